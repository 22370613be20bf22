"""NV centers coupled to a whispering-gallery cavity mode.

Raman-mediated W-state generation and STIRAP Bell-state preparation or
state transfer, with Schrödinger and Lindblad time integration.
"""

from .analytic import bell_fidelity_asymmetric, gate_time, p_max, w_coefficients
from .dynamics import IntegrationError, IntegratorConfig, Trajectory, evolve_lindblad, evolve_state
from .hilbert import DensityMatrix, Operator, SpaceDescriptor, StateVector
from .model import PhysicalConstants, RamanParams, StirapParams
from .pulses import GaussianPulse, stirap_schedule
from .scenarios import ScenarioReport, run_bell_stirap, run_full_vs_effective, run_qit, run_w_state, sweep

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix", "GaussianPulse", "IntegrationError", "IntegratorConfig", "Operator",
    "PhysicalConstants", "RamanParams", "ScenarioReport", "SpaceDescriptor", "StateVector",
    "StirapParams", "Trajectory", "bell_fidelity_asymmetric", "evolve_lindblad", "evolve_state",
    "gate_time", "p_max", "run_bell_stirap", "run_full_vs_effective", "run_qit", "run_w_state",
    "stirap_schedule", "sweep", "w_coefficients",
]

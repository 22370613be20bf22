"""Physical parameters, derived rates and Hamiltonian builders.

All frequencies are angular (rad/s), all times in seconds, hbar = 1.

Raman protocol (qubit sites, far-detuned cavity)::

    H_I(t) = sum_j eta_j [a+ s_j- exp(-i delta_j t) + a s_j+ exp(+i delta_j t)]
    H_eff  = gamma [sum_j |1_j><1_j| + sum_{j != k} s_j+ s_k-],  gamma = |eta^2 / delta|

Resonant STIRAP protocol (Lambda sites A, B)::

    H(t) = sum_j [g_j a+ |0_j><e_j| + Omega_j(t) |e_j><1_j| + h.c.]
    H_decay(t) = H(t) - i kappa/2 a+a - i Gamma/2 sum_j |e_j><e_j|
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .hilbert import (
    EXCITED,
    GROUND_0,
    GROUND_1,
    Operator,
    SpaceDescriptor,
    annihilation,
    hermiticity_error,
    projector,
    sigma_minus,
    sigma_plus,
    spin_transition,
)
from .pulses import GaussianPulse
from .units import SPEED_OF_LIGHT, TWO_PI


# parameter bundles ------------------------------------------------------

@dataclass(frozen=True)
class RamanParams:
    """Per-center Raman parameters (g, Omega, Delta, delta), rad/s."""

    g: tuple[float, ...]
    omega: tuple[float, ...]
    Delta: tuple[float, ...]
    delta: tuple[float, ...]

    def __post_init__(self):
        for name in ("g", "omega", "Delta", "delta"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        n = len(self.g)
        if n == 0 or any(len(getattr(self, k)) != n for k in ("omega", "Delta", "delta")):
            raise ValueError("per-center parameter tuples must be non-empty and equally long")
        for D, d in zip(self.Delta, self.delta):
            if D <= 0 or D + d <= 0:
                raise ValueError("need Delta > 0 and Delta + delta > 0")

    @classmethod
    def identical(cls, n_sites, g, omega, Delta, delta) -> RamanParams:
        return cls((g,) * n_sites, (omega,) * n_sites, (Delta,) * n_sites, (delta,) * n_sites)

    @property
    def n_sites(self) -> int:
        return len(self.g)

    @property
    def etas(self) -> tuple[float, ...]:
        return tuple(eta(*p) for p in zip(self.g, self.omega, self.Delta, self.delta))

    @property
    def is_uniform(self) -> bool:
        return len(set(self.etas)) == 1 and len(set(self.delta)) == 1

    def gamma(self) -> float:
        if not self.is_uniform:
            raise ValueError("effective exchange rate needs identical eta and delta on every center")
        return gamma_exchange(self.etas[0], self.delta[0])

    def is_valid(self) -> bool:
        """Large-detuning predicate: Delta_j >= 10 max(g_j, Omega_j) and delta_j > 0."""
        return all(
            D >= 10 * max(g, o) and d > 0
            for g, o, D, d in zip(self.g, self.omega, self.Delta, self.delta)
        )


@dataclass(frozen=True)
class StirapParams:
    g_a: float
    g_b: float
    pulse_a: GaussianPulse
    pulse_b: GaussianPulse
    kappa: float = 0.0
    gamma: float = 0.0  # excited-state decay

    def __post_init__(self):
        if self.g_a <= 0 or self.g_b <= 0:
            raise ValueError("couplings g_a, g_b must be positive")
        if self.kappa < 0 or self.gamma < 0:
            raise ValueError("decay rates must be non-negative")

    def without_decay(self) -> StirapParams:
        return StirapParams(self.g_a, self.g_b, self.pulse_a, self.pulse_b)


@dataclass(frozen=True)
class PhysicalConstants:
    wavelength: float = 637e-9
    gamma0: float = TWO_PI * 83e6
    Q: float = 1e9
    mode_volume: float = 100e-18
    field_ratio: float = 1 / 6
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        for name in ("wavelength", "gamma0", "Q", "mode_volume", "field_ratio", "c"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.field_ratio > 1:
            raise ValueError("field_ratio cannot exceed 1")


# derived rates ----------------------------------------------------------

def eta(g, omega, Delta, delta):
    """Raman coupling g*Omega*(1/(Delta+delta) + 1/Delta)."""
    if Delta <= 0 or Delta + delta <= 0:
        raise ValueError("need Delta > 0 and Delta + delta > 0")
    return g * omega * (1.0 / (Delta + delta) + 1.0 / Delta)


def omega_for_eta(target_eta, g, Delta, delta):
    """Laser Rabi frequency giving Raman coupling ``target_eta``."""
    return target_eta / eta(g, 1.0, Delta, delta)


def gamma_exchange(eta_value, delta):
    if delta == 0:
        raise ValueError("delta = 0: resonant case, no effective exchange Hamiltonian")
    return abs(eta_value**2 / delta)


def interaction_volume(constants: PhysicalConstants):
    return 3 * constants.c * constants.wavelength**2 / (4 * math.pi * constants.gamma0)


def g_max(constants: PhysicalConstants):
    """Gamma0 * |E(r)/E_max| * sqrt(V_a / V_m)."""
    va = interaction_volume(constants)
    return constants.gamma0 * constants.field_ratio * math.sqrt(va / constants.mode_volume)


def cavity_kappa(wavelength, Q, c=SPEED_OF_LIGHT):
    if Q <= 0:
        raise ValueError("Q must be positive")
    return (TWO_PI * c / wavelength) / Q


def gamma_eff_spont(gamma0, omega, g, Delta):
    if Delta <= 0:
        raise ValueError("Delta must be positive")
    return gamma0 * omega * g / Delta**2


# time-dependent operator sources --------------------------------------

@dataclass(frozen=True, eq=False)
class TimeDependentHamiltonian:
    """``H(t) = static + sum_k f_k(t) M_k`` evaluated on demand.

    ``bounds[k]`` bounds ``|f_k(t)|`` and ``rates[k]`` is the fastest
    frequency at which ``f_k`` varies. ``scale`` is the larger of the norm
    bound on H(t) and those rates; integrators pick their step from it.
    """

    space: SpaceDescriptor
    static: np.ndarray
    terms: tuple[tuple[Callable[[float], complex], np.ndarray], ...] = ()
    bounds: tuple[float, ...] = ()
    rates: tuple[float, ...] = ()
    hermitian: bool = True
    scale: float = field(init=False)

    def __post_init__(self):
        norm = np.linalg.norm(self.static, 2) + sum(
            b * np.linalg.norm(m, 2) for b, (_, m) in zip(self.bounds, self.terms)
        )
        object.__setattr__(self, "scale", float(max(norm, *self.rates, 0.0)))

    def __call__(self, t) -> np.ndarray:
        h = self.static.copy()
        for f, m in self.terms:
            h += f(t) * m
        return h

    def operator(self, t) -> Operator:
        return Operator(self.space, self(t), hermitian=self.hermitian)


def _require_qubits(space: SpaceDescriptor, n_sites=None):
    if space.levels_per_site != 2:
        raise ValueError("this Hamiltonian needs a qubit (2-level) space")
    if n_sites is not None and space.n_sites != n_sites:
        raise ValueError(f"space has {space.n_sites} sites, parameters describe {n_sites}")


def interaction_hamiltonian(params: RamanParams, space: SpaceDescriptor) -> TimeDependentHamiltonian:
    _require_qubits(space, params.n_sites)
    if space.n_max < 1:
        raise ValueError("the Raman interaction Hamiltonian needs a cavity factor (n_max >= 1)")
    a = annihilation(space).matrix
    ad = a.conj().T
    # group centers sharing a detuning so each phase factor is applied once
    groups: dict[float, np.ndarray] = {}
    for j, (e, d) in enumerate(zip(params.etas, params.delta), start=1):
        x = e * (ad @ sigma_minus(space, j).matrix)
        groups[d] = groups.get(d, 0) + x
    terms, bounds, rates = [], [], []
    for d, x in groups.items():
        terms.append((lambda t, d=d: np.exp(-1j * d * t), x))
        terms.append((lambda t, d=d: np.exp(1j * d * t), x.conj().T))
        bounds += [1.0, 1.0]
        rates += [abs(d), abs(d)]
    zero = np.zeros((space.dim, space.dim), dtype=complex)
    return TimeDependentHamiltonian(space, zero, tuple(terms), tuple(bounds), tuple(rates))


def build_h_interaction(params: RamanParams, space: SpaceDescriptor, t: float) -> Operator:
    return interaction_hamiltonian(params, space).operator(t)


def build_h_eff(gamma: float, n_sites: int, space: SpaceDescriptor) -> Operator:
    if n_sites < 2:
        raise ValueError("the exchange Hamiltonian needs at least two centers")
    _require_qubits(space, n_sites)
    h = np.zeros((space.dim, space.dim), dtype=complex)
    for j in range(1, n_sites + 1):
        h += projector(space, j, GROUND_1).matrix
        for k in range(1, n_sites + 1):
            if j != k:
                h += sigma_plus(space, j).matrix @ sigma_minus(space, k).matrix
    return Operator(space, gamma * h, hermitian=True)


def _require_stirap_space(space: SpaceDescriptor):
    if space.n_sites != 2 or space.levels_per_site != 3 or space.n_max < 1:
        raise ValueError("STIRAP Hamiltonian needs two 3-level sites and n_max >= 1")


def _stirap_parts(params: StirapParams, space: SpaceDescriptor):
    _require_stirap_space(space)
    ad = annihilation(space).dag().matrix
    static = np.zeros((space.dim, space.dim), dtype=complex)
    for site, g in ((1, params.g_a), (2, params.g_b)):
        x = g * (ad @ spin_transition(space, site, EXCITED, GROUND_0).matrix)
        static += x + x.conj().T
    drives = []
    for site in (1, 2):
        x = spin_transition(space, site, GROUND_1, EXCITED).matrix
        drives.append(x + x.conj().T)
    return static, drives


def stirap_hamiltonian(params: StirapParams, space: SpaceDescriptor, decay=False) -> TimeDependentHamiltonian:
    """Resonant Lambda-system Hamiltonian; ``decay=True`` adds the non-Hermitian loss terms."""
    static, (drive_a, drive_b) = _stirap_parts(params, space)
    hermitian = True
    if decay and (params.kappa > 0 or params.gamma > 0):
        static = static + decay_operator(params, space)
        hermitian = False
    terms = ((params.pulse_a, drive_a), (params.pulse_b, drive_b))
    bounds = (params.pulse_a.peak, params.pulse_b.peak)
    rates = (1 / params.pulse_a.waist, 1 / params.pulse_b.waist)
    return TimeDependentHamiltonian(space, static, terms, bounds, rates, hermitian=hermitian)


def decay_operator(params: StirapParams, space: SpaceDescriptor) -> np.ndarray:
    """Anti-Hermitian part ``-i kappa/2 a+a - i Gamma/2 sum_j |e_j><e_j|``."""
    if params.kappa < 0 or params.gamma < 0:
        raise ValueError("decay rates must be non-negative")
    a = annihilation(space).matrix
    loss = 0.5 * params.kappa * (a.conj().T @ a)
    for site in (1, 2):
        loss = loss + 0.5 * params.gamma * projector(space, site, EXCITED).matrix
    return -1j * loss


def build_h_stirap(params: StirapParams, space: SpaceDescriptor, t: float) -> Operator:
    return stirap_hamiltonian(params, space).operator(t)


def build_h_decay(params: StirapParams, space: SpaceDescriptor, t: float) -> Operator:
    return stirap_hamiltonian(params, space, decay=True).operator(t)


def lindblad_jumps(rate: float, n_sites: int, space: SpaceDescriptor) -> list[tuple[float, Operator]]:
    """One ``sigma_j^-`` dissipator per center, all at ``rate``."""
    if rate < 0:
        raise ValueError("decay rate must be non-negative")
    _require_qubits(space, n_sites)
    return [(rate, sigma_minus(space, j)) for j in range(1, n_sites + 1)]


def is_hermitian(op: Operator | np.ndarray, tol=1e-12) -> bool:
    m = op.matrix if isinstance(op, Operator) else op
    return hermiticity_error(m) < tol


def total_excitation(space: SpaceDescriptor, sites: Sequence[int] | None = None) -> Operator:
    sites = range(1, space.n_sites + 1) if sites is None else sites
    m = sum(projector(space, j, GROUND_1).matrix for j in sites)
    return Operator(space, m, hermitian=True)

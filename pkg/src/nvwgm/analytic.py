"""Closed-form results for both protocols."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .hilbert import SpaceDescriptor, StateVector
from .units import MHZ, US


@dataclass(frozen=True)
class WStateResult:
    c1: complex
    c2: complex
    probability: float


def w_coefficients(n_sites: int, gamma: float, t: float) -> WStateResult:
    """Amplitudes of |0..0 1_N> and |W_{N-1}>|0_N> under the exchange Hamiltonian."""
    if n_sites < 2:
        raise ValueError("need at least two centers")
    ph = cmath.exp(-1j * n_sites * gamma * t)
    c1 = (ph + n_sites - 1) / n_sites
    c2 = math.sqrt(n_sites - 1) * (ph - 1) / n_sites
    p1, p2 = abs(c1) ** 2, abs(c2) ** 2
    return WStateResult(c1, c2, p2 / (p1 + p2))


def w_probability(n_sites: int, gamma: float, t) -> np.ndarray:
    """Vectorized success probability |C2|^2 / (|C1|^2 + |C2|^2)."""
    if n_sites < 2:
        raise ValueError("need at least two centers")
    ph = np.exp(-1j * n_sites * gamma * np.asarray(t, dtype=float))
    c1 = (ph + n_sites - 1) / n_sites
    c2 = math.sqrt(n_sites - 1) * (ph - 1) / n_sites
    p2 = np.abs(c2) ** 2
    return p2 / (np.abs(c1) ** 2 + p2)


def p_max(n_sites: int) -> float:
    if n_sites < 2:
        raise ValueError("need at least two centers")
    return 4 * (n_sites - 1) / (4 * (n_sites - 1) + (n_sites - 2) ** 2)


def gate_time(n_sites: int, gamma: float, k: int = 0) -> float:
    """(2k + 1) pi / (N gamma)."""
    if n_sites < 2 or gamma <= 0 or k < 0:
        raise ValueError("need N >= 2, gamma > 0, k >= 0")
    return (2 * k + 1) * math.pi / (n_sites * gamma)


def gate_time_us(n_sites: int, gamma_mhz: float, k: int = 0) -> float:
    """Gate time in microseconds with gamma given as 2pi x MHz."""
    return gate_time(n_sites, gamma_mhz * MHZ, k) / US


# states -----------------------------------------------------------------

def w_state(n_qubits: int) -> np.ndarray:
    """Symmetric single-excitation state of ``n_qubits`` qubits (qubit-only basis)."""
    v = np.zeros(2**n_qubits, dtype=complex)
    for j in range(n_qubits):
        v[1 << (n_qubits - 1 - j)] = 1.0
    return v / math.sqrt(n_qubits)


def w_target(space: SpaceDescriptor) -> StateVector:
    """``|W_{N-1}>|0_N>`` with the cavity (if any) in vacuum."""
    n = space.n_sites
    amps = np.zeros(space.dim, dtype=complex)
    for j in range(n - 1):
        sites = [0] * n
        sites[j] = 1
        amps[space.index(sites, 0)] = 1 / math.sqrt(n - 1)
    return StateVector(space, amps)


def w_evolved(space: SpaceDescriptor, gamma: float, t: float) -> StateVector:
    """Ideal state C1 |0..0 1> + C2 |W_{N-1}> |0>."""
    r = w_coefficients(space.n_sites, gamma, t)
    initial = np.zeros(space.dim, dtype=complex)
    initial[space.index([0] * (space.n_sites - 1) + [1], 0)] = 1
    amps = r.c1 * initial + r.c2 * w_target(space).amplitudes
    return StateVector(space, amps)


def bell_state(space: SpaceDescriptor) -> StateVector:
    """(|1_A 0_B> + |0_A 1_B>)/sqrt(2) with the cavity in vacuum."""
    if space.n_sites != 2:
        raise ValueError("Bell state needs two sites")
    amps = np.zeros(space.dim, dtype=complex)
    amps[space.index((1, 0), 0)] = amps[space.index((0, 1), 0)] = 1 / math.sqrt(2)
    return StateVector(space, amps)


def dark_state(g_a, g_b, omega_a, omega_b, space: SpaceDescriptor) -> StateVector:
    """Normalized null vector of the STIRAP Hamiltonian in the one-excitation sector.

    The |1_A 0_B 0_c> amplitude is real and non-negative.
    """
    c = (omega_b * g_a, omega_a * g_b, -omega_a * omega_b)
    norm = math.sqrt(sum(x * x for x in c))
    if norm == 0:
        raise ValueError("all dark-state amplitudes vanish")
    if space.n_sites != 2 or space.n_max < 1:
        raise ValueError("dark state needs two sites and a cavity")
    amps = np.zeros(space.dim, dtype=complex)
    amps[space.index((1, 0), 0)] = c[0] / norm
    amps[space.index((0, 1), 0)] = c[1] / norm
    amps[space.index((0, 0), 1)] = c[2] / norm
    return StateVector(space, amps)


def second_dark_state(space: SpaceDescriptor) -> StateVector:
    return space.basis_state((0, 0), 0)


def qit_target(c0: complex, c1: complex, space: SpaceDescriptor) -> StateVector:
    """``|0_A> (c0 |0_B> + c1 |1_B>) |0_c>``."""
    amps = np.zeros(space.dim, dtype=complex)
    amps[space.index((0, 0), 0)] = c0
    amps[space.index((0, 1), 0)] = c1
    return StateVector(space, amps)


def bell_fidelity_asymmetric(g_a: float, g_b: float) -> float:
    """(g_A + g_B)^2 / [2 (g_A^2 + g_B^2)]."""
    den = 2 * (g_a**2 + g_b**2)
    if den == 0:
        raise ValueError("both couplings vanish")
    return (g_a + g_b) ** 2 / den


def vacuum_success_probability(g_a, g_b, omega_0) -> float:
    """Weight of the cavity-vacuum component of the dark state at Omega_A = Omega_B."""
    w = omega_0**2 * (g_a**2 + g_b**2)
    return w / (w + omega_0**4)


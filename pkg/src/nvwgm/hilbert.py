"""Composite Hilbert space of N NV centers and one cavity mode.

Basis ordering is site 1 ⊗ ... ⊗ site N ⊗ cavity, lexicographic within
each factor, so the cavity photon number is the fastest-running index.
Site levels are numbered 0 -> |0>, 1 -> |1>, 2 -> |e>.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

GROUND_0 = 0
GROUND_1 = 1
EXCITED = 2

_LEVEL_NAMES = {"0": GROUND_0, "1": GROUND_1, "e": EXCITED}


def _level(level) -> int:
    if isinstance(level, str):
        try:
            return _LEVEL_NAMES[level]
        except KeyError:
            raise ValueError(f"unknown level {level!r}") from None
    return int(level)


@dataclass(frozen=True)
class SpaceDescriptor:
    """Shape of the site ⊗ cavity product space.

    ``n_max = 0`` leaves a one-dimensional cavity factor, which is how a
    qubit-only space is represented. ``n_sites = 0`` gives a bare cavity.
    """

    n_sites: int
    levels_per_site: int = 2
    n_max: int = 0

    def __post_init__(self):
        if self.n_sites < 0:
            raise ValueError("n_sites must be non-negative")
        if self.levels_per_site not in (2, 3):
            raise ValueError("levels_per_site must be 2 or 3")
        if self.n_max < 0:
            raise ValueError("n_max must be non-negative")
        if self.n_sites == 0 and self.n_max == 0:
            raise ValueError("empty space: no sites and no cavity")

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.levels_per_site,) * self.n_sites + (self.n_max + 1,)

    @property
    def dim(self) -> int:
        return self.levels_per_site**self.n_sites * (self.n_max + 1)

    @property
    def has_cavity(self) -> bool:
        return self.n_max > 0

    def index(self, sites: Sequence, photons: int = 0) -> int:
        """Flat basis index of ``|sites..., photons_c>``."""
        sites = tuple(_level(s) for s in sites)
        if len(sites) != self.n_sites:
            raise ValueError(f"expected {self.n_sites} site labels, got {len(sites)}")
        for s in sites:
            if not 0 <= s < self.levels_per_site:
                raise ValueError(f"level {s} invalid for {self.levels_per_site}-level sites")
        if not 0 <= photons <= self.n_max:
            raise ValueError(f"photon number {photons} outside 0..{self.n_max}")
        return int(np.ravel_multi_index(sites + (photons,), self.dims))

    def labels(self, index: int) -> tuple[tuple[int, ...], int]:
        """Inverse of :meth:`index`: ``(site levels, photon number)``."""
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} outside 0..{self.dim - 1}")
        multi = np.unravel_index(index, self.dims)
        return tuple(int(m) for m in multi[:-1]), int(multi[-1])

    def label_string(self, index: int) -> str:
        sites, n = self.labels(index)
        names = "01e"
        return "".join(names[s] for s in sites) + f"_{n}c"

    def basis_state(self, sites: Sequence, photons: int = 0) -> StateVector:
        amps = np.zeros(self.dim, dtype=complex)
        amps[self.index(sites, photons)] = 1.0
        return StateVector(self, amps)

    def identity(self) -> Operator:
        return Operator(self, np.eye(self.dim, dtype=complex), hermitian=True)


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex matrix acting on a :class:`SpaceDescriptor`."""

    space: SpaceDescriptor
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError(f"matrix shape {m.shape} does not match dimension {self.space.dim}")
        object.__setattr__(self, "matrix", m)
        if self.hermitian and hermiticity_error(m) >= 1e-12:
            raise ValueError("operator flagged Hermitian but A - A^dagger is not zero")

    def dag(self) -> Operator:
        return Operator(self.space, self.matrix.conj().T, hermitian=self.hermitian)

    def _check(self, other: Operator):
        if other.space != self.space:
            raise ValueError("operators live on different spaces")

    def __matmul__(self, other):
        # Operator @ StateVector returns raw amplitudes: the result need not be a state.
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.space, self.matrix @ other.matrix)
        if isinstance(other, StateVector):
            if other.space != self.space:
                raise ValueError("state and operator live on different spaces")
            return self.matrix @ other.amplitudes
        return NotImplemented

    def __add__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.space, self.matrix + other.matrix,
                        hermitian=self.hermitian and other.hermitian)

    def __sub__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.space, self.matrix - other.matrix,
                        hermitian=self.hermitian and other.hermitian)

    def __mul__(self, c) -> Operator:
        return Operator(self.space, c * self.matrix,
                        hermitian=self.hermitian and np.isreal(c))

    __rmul__ = __mul__

    def commutator(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.space, self.matrix @ other.matrix - other.matrix @ self.matrix)

    def expect(self, state: StateVector) -> complex:
        return complex(np.vdot(state.amplitudes, self.matrix @ state.amplitudes))


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


@dataclass(frozen=True, eq=False)
class StateVector:
    space: SpaceDescriptor
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape != (self.space.dim,):
            raise ValueError(f"amplitude shape {a.shape} does not match dimension {self.space.dim}")
        norm = np.linalg.norm(a)
        if not 0 < norm <= 1 + 1e-9:
            raise ValueError(f"state norm {norm} outside (0, 1]")
        object.__setattr__(self, "amplitudes", a)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> StateVector:
        return StateVector(self.space, self.amplitudes / self.norm)

    def overlap(self, other: StateVector) -> complex:
        """``<self|other>``."""
        if other.space != self.space:
            raise ValueError("states live on different spaces")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_density(self) -> DensityMatrix:
        return DensityMatrix(self.space, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    space: SpaceDescriptor
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError(f"matrix shape {m.shape} does not match dimension {self.space.dim}")
        if hermiticity_error(m) >= 1e-10:
            raise ValueError("density matrix is not Hermitian")
        object.__setattr__(self, "matrix", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def is_valid(self, trace_tol=1e-9, eig_tol=1e-8) -> bool:
        return abs(self.trace - 1) < trace_tol and self.min_eigenvalue() >= -eig_tol

    @classmethod
    def maximally_mixed(cls, space: SpaceDescriptor) -> DensityMatrix:
        return cls(space, np.eye(space.dim, dtype=complex) / space.dim)


# elementary operators ---------------------------------------------------

def embed_product(space: SpaceDescriptor, factors: Sequence[np.ndarray | None]) -> Operator:
    """Kronecker product of one matrix per tensor factor (``None`` = identity)."""
    dims = space.dims
    if len(factors) != len(dims):
        raise ValueError(f"expected {len(dims)} factors, got {len(factors)}")
    out = np.ones((1, 1), dtype=complex)
    for k, (d, f) in enumerate(zip(dims, factors)):
        f = np.eye(d, dtype=complex) if f is None else np.asarray(f, dtype=complex)
        if f.shape != (d, d):
            raise ValueError(f"factor {k} has shape {f.shape}, expected {(d, d)}")
        out = np.kron(out, f)
    return Operator(space, out)


def _ladder(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)


def annihilation(space: SpaceDescriptor) -> Operator:
    factors = [None] * space.n_sites + [_ladder(space.n_max)]
    return embed_product(space, factors)


def creation(space: SpaceDescriptor) -> Operator:
    return annihilation(space).dag()


def number(space: SpaceDescriptor) -> Operator:
    a = annihilation(space)
    return Operator(space, a.matrix.conj().T @ a.matrix, hermitian=True)


def spin_transition(space: SpaceDescriptor, site: int, from_level, to_level) -> Operator:
    """``|to><from|`` on ``site`` (1-based), identity elsewhere."""
    if not 1 <= site <= space.n_sites:
        raise ValueError(f"site {site} outside 1..{space.n_sites}")
    lo, hi = _level(from_level), _level(to_level)
    for lv in (lo, hi):
        if not 0 <= lv < space.levels_per_site:
            raise ValueError(f"level {lv} invalid for {space.levels_per_site}-level sites")
    m = np.zeros((space.levels_per_site,) * 2, dtype=complex)
    m[hi, lo] = 1.0
    factors: list = [None] * (space.n_sites + 1)
    factors[site - 1] = m
    return embed_product(space, factors)


def sigma_plus(space: SpaceDescriptor, site: int) -> Operator:
    return spin_transition(space, site, GROUND_0, GROUND_1)


def sigma_minus(space: SpaceDescriptor, site: int) -> Operator:
    return spin_transition(space, site, GROUND_1, GROUND_0)


def projector(space: SpaceDescriptor, site: int, level) -> Operator:
    p = spin_transition(space, site, level, level)
    return Operator(space, p.matrix, hermitian=True)


def excitation_number(space: SpaceDescriptor) -> Operator:
    """Sum over sites of ``|1_j><1_j|``."""
    total = np.zeros((space.dim, space.dim), dtype=complex)
    for j in range(1, space.n_sites + 1):
        total += projector(space, j, GROUND_1).matrix
    return Operator(space, total, hermitian=True)


class CavityProjection(NamedTuple):
    state: StateVector | None
    probability: float

    @property
    def empty(self) -> bool:
        return self.state is None


def cavity_projector(space: SpaceDescriptor, n: int) -> np.ndarray:
    """Diagonal mask selecting basis states with ``n`` photons."""
    if not 0 <= n <= space.n_max:
        raise ValueError(f"photon number {n} outside 0..{space.n_max}")
    photons = np.arange(space.dim) % (space.n_max + 1)
    return photons == n


def project_cavity(state: StateVector, n: int) -> CavityProjection:
    """Project the cavity on ``|n_c>``.

    The probability is ``||P_n psi||^2`` without dividing by the input norm,
    so lost norm from non-Hermitian evolution counts against success.
    """
    mask = cavity_projector(state.space, n)
    amps = np.where(mask, state.amplitudes, 0)
    prob = float(np.vdot(amps, amps).real)
    if prob == 0.0:
        return CavityProjection(None, 0.0)
    return CavityProjection(StateVector(state.space, amps / np.sqrt(prob)), prob)

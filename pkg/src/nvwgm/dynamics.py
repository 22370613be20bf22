"""Schrödinger and Lindblad time integration.

The default integrator is classical fixed-step RK4. Each interval of the
requested output grid is split into equal substeps no longer than
``1 / (resolution * scale)``, where ``scale`` bounds ||H(t)||. An adaptive
embedded pair (scipy's DOP853) is available through ``method="adaptive"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .hilbert import DensityMatrix, Operator, SpaceDescriptor, StateVector, hermiticity_error
from .model import TimeDependentHamiltonian

# above this dimension trajectories keep reductions only unless asked otherwise
SNAPSHOT_DIM_LIMIT = 256


class IntegrationError(RuntimeError):
    """Integrator gave up; ``partial`` holds the trajectory up to the failure."""

    def __init__(self, message, partial: Trajectory | None = None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"  # "rk4" or "adaptive"
    step: float | None = None  # absolute max step (s); None -> derived from resolution
    resolution: float = 40.0  # substeps per unit of 1/||H||
    rtol: float = 1e-10
    atol: float = 1e-12
    max_steps: int = 5_000_000

    def __post_init__(self):
        if self.method not in ("rk4", "adaptive"):
            raise ValueError(f"unknown integration method {self.method!r}")
        if (self.step is not None and self.step <= 0) or self.resolution <= 0:
            raise ValueError("step and resolution must be positive")
        if self.rtol <= 0 or self.atol <= 0 or self.max_steps <= 0:
            raise ValueError("tolerances and max_steps must be positive")

    def max_step(self, scale: float) -> float:
        if self.step is not None:
            return self.step
        if scale <= 0:
            return math.inf
        return 1.0 / (self.resolution * scale)


@dataclass(frozen=True, eq=False)
class Trajectory:
    space: SpaceDescriptor
    times: np.ndarray
    kind: str  # "state" or "density"
    states: np.ndarray | None = None  # (n_times, dim) or (n_times, dim, dim)
    reductions: dict[str, np.ndarray] = field(default_factory=dict)
    norms: np.ndarray | None = None  # ||psi|| or tr(rho)
    steps: int = 0
    last: np.ndarray | None = None  # final state, kept even without snapshots

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory time grid must be strictly increasing")

    def state_at(self, k: int):
        if self.states is None:
            raise ValueError("trajectory was recorded without snapshots")
        if self.kind == "state":
            return StateVector(self.space, self.states[k])
        return DensityMatrix(self.space, self.states[k])

    @property
    def final(self):
        if self.last is None:
            raise ValueError("empty trajectory")
        if self.kind == "state":
            return StateVector(self.space, self.last)
        return DensityMatrix(self.space, self.last)

    def reduce(self, fn: Callable[[np.ndarray], float]) -> np.ndarray:
        if self.states is None:
            raise ValueError("trajectory was recorded without snapshots")
        return np.array([fn(s) for s in self.states])


# Hamiltonian sources ---------------------------------------------------

def _as_source(H, space: SpaceDescriptor):
    """Normalize H to ``(callable t -> matrix, scale, constant?)``."""
    if isinstance(H, TimeDependentHamiltonian):
        if H.space != space:
            raise ValueError("Hamiltonian and state live on different spaces")
        return H, H.scale, False
    if isinstance(H, Operator):
        if H.space != space:
            raise ValueError("Hamiltonian and state live on different spaces")
        H = H.matrix
    if callable(H):
        m0 = np.asarray(H(0.0))
        if m0.shape != (space.dim, space.dim):
            raise ValueError("Hamiltonian dimension does not match the state")
        return H, None, False
    m = np.asarray(H, dtype=complex)
    if m.shape != (space.dim, space.dim):
        raise ValueError("Hamiltonian dimension does not match the state")
    return (lambda t: m), float(np.linalg.norm(m, 2)), True


def _estimate_scale(h, times):
    probe = np.linspace(times[0], times[-1], 4 * len(times) + 1)
    return max(float(np.linalg.norm(h(t), 2)) for t in probe)


def _rk4_run(rhs, y0, times, max_step, max_steps, on_record, on_step=None):
    y = y0.copy()
    on_record(0, y)
    steps = 0
    for k in range(len(times) - 1):
        t0, t1 = times[k], times[k + 1]
        n = max(1, math.ceil((t1 - t0) / max_step - 1e-9))
        h = (t1 - t0) / n
        for i in range(n):
            t = t0 + i * h
            k1 = rhs(t, y)
            k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if on_step is not None:
                y = on_step(y)
            steps += 1
            if steps > max_steps:
                raise _StepLimit(k)
        on_record(k + 1, y)
    return steps


class _StepLimit(Exception):
    def __init__(self, last_index):
        self.last_index = last_index


def _adaptive_run(rhs, y0, times, max_step, config, on_record, on_step=None):
    if len(times) == 1:
        on_record(0, y0)
        return 0
    sol = solve_ivp(
        rhs, (times[0], times[-1]), y0, method="DOP853", t_eval=times,
        rtol=config.rtol, atol=config.atol,
        max_step=max_step if math.isfinite(max_step) else np.inf,
    )
    n_done = sol.y.shape[1]
    for k in range(n_done):
        y = sol.y[:, k]
        on_record(k, on_step(y) if on_step is not None else y)
    if not sol.success or n_done < len(times):
        raise _StepLimit(n_done - 1)
    return int(sol.nfev)


class _Recorder:
    def __init__(self, n, shape, keep, reductions):
        self.keep = keep
        self.states = np.empty((n,) + shape, dtype=complex) if keep else None
        self.reductions = {name: np.empty(n, dtype=complex) for name in reductions}
        self.fns = reductions
        self.norms = np.empty(n)
        self.filled = 0
        self.last = None

    def __call__(self, k, state, norm):
        if self.keep:
            self.states[k] = state
        for name, fn in self.fns.items():
            self.reductions[name][k] = fn(state)
        self.norms[k] = norm
        self.filled = k + 1
        self.last = state

    def trajectory(self, space, times, kind, steps):
        m = self.filled
        reductions = {}
        for k, v in self.reductions.items():
            v = v[:m]
            reductions[k] = v.real.copy() if not np.any(v.imag) else v
        return Trajectory(
            space, np.asarray(times[:m]), kind,
            None if self.states is None else self.states[:m],
            reductions, self.norms[:m], steps,
            None if self.last is None else np.array(self.last),
        )


def _prepare(space, times, store_states):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 1 or np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be one-dimensional and strictly increasing")
    keep = space.dim <= SNAPSHOT_DIM_LIMIT if store_states is None else store_states
    return times, keep


def evolve_state(
    H,
    psi0: StateVector,
    times: Sequence[float],
    config: IntegratorConfig = IntegratorConfig(),
    reductions: Mapping[str, Callable[[np.ndarray], float]] | None = None,
    store_states: bool | None = None,
) -> Trajectory:
    """Integrate ``i dpsi/dt = H(t) psi`` and record on ``times``.

    ``H`` may be an :class:`Operator`, a matrix, a
    :class:`~nvwgm.model.TimeDependentHamiltonian`, or any callable
    ``t -> matrix``. Non-Hermitian H is integrated without renormalizing,
    so the norm lost is the leakage probability.
    """
    space = psi0.space
    times, keep = _prepare(space, times, store_states)
    h, scale, constant = _as_source(H, space)
    if scale is None:
        scale = _estimate_scale(h, times)
    max_step = config.max_step(scale)
    reductions = dict(reductions or {})

    if constant:
        m = h(0.0)
        rhs = lambda t, y: -1j * (m @ y)  # noqa: E731
    else:
        rhs = lambda t, y: -1j * (h(t) @ y)  # noqa: E731

    rec = _Recorder(len(times), (space.dim,), keep, reductions)

    def record(k, y):
        rec(k, y, float(np.linalg.norm(y)))

    try:
        if config.method == "rk4":
            steps = _rk4_run(rhs, psi0.amplitudes, times, max_step, config.max_steps, record)
        else:
            steps = _adaptive_run(rhs, psi0.amplitudes, times, max_step, config, record)
    except _StepLimit:
        raise IntegrationError(
            f"step budget exhausted after {rec.filled} of {len(times)} output points",
            rec.trajectory(space, times, "state", config.max_steps),
        ) from None
    return rec.trajectory(space, times, "state", steps)


def lindblad_rhs(h, jumps):
    """Right-hand side ``-i[H, rho] + sum_k r_k (2 L rho L+ - L+L rho - rho L+L)``."""
    ls = [(r, L, L.conj().T, L.conj().T @ L) for r, L in jumps if r != 0]

    def rhs(t, rho):
        H = h(t)
        out = -1j * (H @ rho - rho @ H)
        for r, L, Ld, LdL in ls:
            out += r * (2 * L @ rho @ Ld - LdL @ rho - rho @ LdL)
        return out

    return rhs


def evolve_lindblad(
    H,
    jumps: Sequence[tuple[float, Operator | np.ndarray]],
    rho0: DensityMatrix | StateVector,
    times: Sequence[float],
    config: IntegratorConfig = IntegratorConfig(),
    reductions: Mapping[str, Callable[[np.ndarray], float]] | None = None,
    store_states: bool | None = None,
) -> Trajectory:
    """Integrate the master equation with one dissipator per ``(rate, L)``.

    The dissipator follows the ``2 L rho L+ - {L+L, rho}`` convention, so a
    single decaying level empties as ``exp(-2 rate t)``.
    """
    if isinstance(rho0, StateVector):
        rho0 = rho0.to_density()
    space = rho0.space
    times, keep = _prepare(space, times, store_states)
    h, scale, _ = _as_source(H, space)
    if scale is None:
        scale = _estimate_scale(h, times)
    mats = []
    for r, L in jumps:
        if r < 0:
            raise ValueError("jump rates must be non-negative")
        if isinstance(L, Operator):
            if L.space != space:
                raise ValueError("jump operator lives on a different space")
            L = L.matrix
        L = np.asarray(L, dtype=complex)
        if L.shape != (space.dim, space.dim):
            raise ValueError("jump operator dimension does not match the state")
        mats.append((r, L))
        # the dissipator's frequency scale is 4 r ||L||^2
        scale += 4 * r * float(np.linalg.norm(L, 2)) ** 2
    max_step = config.max_step(scale)
    rhs_mat = lindblad_rhs(h, mats)
    d = space.dim

    def symmetrize(rho):
        return 0.5 * (rho + rho.conj().T)

    rec = _Recorder(len(times), (d, d), keep, dict(reductions or {}))

    if config.method == "rk4":
        def record(k, rho):
            rec(k, rho, float(np.trace(rho).real))

        try:
            steps = _rk4_run(rhs_mat, rho0.matrix, times, max_step, config.max_steps,
                             record, on_step=symmetrize)
        except _StepLimit:
            raise IntegrationError(
                f"step budget exhausted after {rec.filled} of {len(times)} output points",
                rec.trajectory(space, times, "density", config.max_steps),
            ) from None
    else:
        def record(k, y):
            rho = y.reshape(d, d)
            rec(k, rho, float(np.trace(rho).real))

        def rhs_flat(t, y):
            return rhs_mat(t, y.reshape(d, d)).ravel()

        def sym_flat(y):
            return symmetrize(y.reshape(d, d)).ravel()

        try:
            steps = _adaptive_run(rhs_flat, rho0.matrix.ravel(), times, max_step, config,
                                  record, on_step=sym_flat)
        except _StepLimit:
            raise IntegrationError(
                "adaptive integrator failed to reach the end of the grid",
                rec.trajectory(space, times, "density", 0),
            ) from None

    traj = rec.trajectory(space, times, "density", steps)
    drift = float(np.max(np.abs(traj.norms - rho0.trace)))
    herm = hermiticity_error(traj.last)
    if drift > 1e-9 or herm > 1e-10:
        raise IntegrationError(
            f"density matrix left tolerance (trace drift {drift:.2e}, hermiticity {herm:.2e})",
            traj,
        )
    return traj


# observables ----------------------------------------------------------

def fidelity(state, target: StateVector) -> float:
    """``|<target|psi>|^2`` or ``<target|rho|target>`` (no renormalization)."""
    t = target.amplitudes
    if isinstance(state, (StateVector, DensityMatrix)):
        if state.space != target.space:
            raise ValueError("state and target live on different spaces")
        state = state.amplitudes if isinstance(state, StateVector) else state.matrix
    state = np.asarray(state)
    if state.shape[0] != t.shape[0]:
        raise ValueError("state and target dimensions differ")
    if state.ndim == 1:
        return float(abs(np.vdot(t, state)) ** 2)
    return float(np.vdot(t, state @ t).real)


def population_of(state: np.ndarray, index: int) -> float:
    if state.ndim == 1:
        return float(abs(state[index]) ** 2)
    return float(state[index, index].real)


def population(traj: Trajectory, label) -> np.ndarray:
    """Population time series of a basis state.

    ``label`` is a flat index or ``(sites, photons)``.
    """
    space = traj.space
    if isinstance(label, (int, np.integer)):
        if not 0 <= label < space.dim:
            raise ValueError(f"basis index {label} outside the space")
        idx = int(label)
    else:
        sites, photons = label
        idx = space.index(sites, photons)
    if traj.states is None:
        raise ValueError("trajectory was recorded without snapshots")
    if traj.kind == "state":
        return np.abs(traj.states[:, idx]) ** 2
    return traj.states[:, idx, idx].real.copy()

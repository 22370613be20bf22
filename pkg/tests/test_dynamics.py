import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvwgm import model
from nvwgm.dynamics import (
    IntegrationError,
    IntegratorConfig,
    evolve_lindblad,
    evolve_state,
    fidelity,
    population,
)
from nvwgm.hilbert import Operator, SpaceDescriptor, StateVector, sigma_minus
from nvwgm.model import StirapParams
from nvwgm.pulses import GaussianPulse


def test_zero_hamiltonian_is_identity():
    space = SpaceDescriptor(2, 2, 1)
    psi = space.basis_state((1, 0), 1)
    tr = evolve_state(np.zeros((space.dim, space.dim)), psi, np.linspace(0, 1, 5))
    for k in range(5):
        np.testing.assert_array_equal(tr.state_at(k).amplitudes, psi.amplitudes)


def test_full_exchange_two_sites():
    # eigenphases {0, 2}: |10> -> |01> at gamma t = pi/2
    space = SpaceDescriptor(2, 2, 0)
    H = model.build_h_eff(1.0, 2, space)
    tr = evolve_state(H, space.basis_state((1, 0)), np.linspace(0, math.pi / 2, 11),
                      IntegratorConfig(resolution=200))
    assert population(tr, ((0, 1), 0))[-1] == pytest.approx(1.0, abs=1e-10)
    t = tr.times
    np.testing.assert_allclose(population(tr, ((0, 1), 0)), np.sin(t) ** 2, atol=1e-10)


def test_hermitian_norm_drift():
    space = SpaceDescriptor(3, 2, 1)
    params = model.RamanParams.identical(3, 1.0, 1.0, 20.0, 2.0)
    tr = evolve_state(model.interaction_hamiltonian(params, space),
                      space.basis_state((0, 0, 1)), np.linspace(0, 20, 41))
    assert np.max(np.abs(tr.norms - 1)) < 1e-8


def test_non_hermitian_norm_strictly_decreasing():
    space = SpaceDescriptor(2, 3, 1)
    p = GaussianPulse(1.0, 1.0, 1.0)
    params = StirapParams(1.0, 1.0, p, p, kappa=0.2, gamma=0.3)
    amps = np.zeros(space.dim, dtype=complex)
    amps[space.index((2, 0), 0)] = 1
    H = model.stirap_hamiltonian(params, space, decay=True)
    tr = evolve_state(H, StateVector(space, amps), np.linspace(0, 3, 31))
    assert np.all(np.diff(tr.norms) < 0)


def test_rk4_fourth_order_convergence():
    space = SpaceDescriptor(2, 2, 0)
    H = model.build_h_eff(1.0, 2, space)
    psi = space.basis_state((1, 0))
    exact = np.sin(1.0) ** 2
    errs = []
    for h in (0.1, 0.05):
        tr = evolve_state(H, psi, [0.0, 1.0], IntegratorConfig(step=h))
        errs.append(abs(abs(tr.last[space.index((0, 1))]) ** 2 - exact))
    assert errs[0] / errs[1] >= 8


def test_adaptive_matches_rk4():
    space = SpaceDescriptor(2, 2, 0)
    H = model.build_h_eff(1.0, 2, space)
    psi = space.basis_state((1, 0))
    a = evolve_state(H, psi, np.linspace(0, 2, 5), IntegratorConfig(method="adaptive"))
    b = evolve_state(H, psi, np.linspace(0, 2, 5))
    np.testing.assert_allclose(a.last, b.last, atol=1e-8)


def test_step_exhaustion_keeps_partial():
    space = SpaceDescriptor(2, 2, 0)
    H = model.build_h_eff(1.0, 2, space)
    with pytest.raises(IntegrationError) as err:
        evolve_state(H, space.basis_state((1, 0)), np.linspace(0, 10, 11),
                     IntegratorConfig(step=0.01, max_steps=50))
    assert err.value.partial is not None


def test_dimension_mismatch():
    space = SpaceDescriptor(2, 2, 0)
    with pytest.raises(ValueError):
        evolve_state(np.zeros((3, 3)), space.basis_state((1, 0)), [0.0, 1.0])
    with pytest.raises(ValueError):
        evolve_state(np.zeros((4, 4)), space.basis_state((1, 0)), [1.0, 0.0])


@settings(max_examples=15, deadline=None)
@given(st.floats(0.01, 2.0), st.floats(0.1, 3.0))
def test_lindblad_single_qubit_decay(rate, t_end):
    space = SpaceDescriptor(1, 2, 0)
    times = np.linspace(0, t_end, 11)
    tr = evolve_lindblad(np.zeros((2, 2)), model.lindblad_jumps(rate, 1, space),
                         space.basis_state((1,)), times)
    np.testing.assert_allclose(population(tr, 1), np.exp(-2 * rate * times), atol=1e-7)


def test_lindblad_trace_and_positivity():
    space = SpaceDescriptor(2, 2, 0)
    H = model.build_h_eff(1.0, 2, space)
    tr = evolve_lindblad(H, model.lindblad_jumps(0.1, 2, space), space.basis_state((1, 0)),
                         np.linspace(0, 5, 21))
    assert np.max(np.abs(tr.norms - 1)) < 1e-9
    for k in range(len(tr.times)):
        rho = tr.state_at(k).matrix
        assert np.min(np.linalg.eigvalsh(rho)) > -1e-8


def test_lindblad_without_jumps_matches_pure():
    space = SpaceDescriptor(2, 2, 0)
    H = model.build_h_eff(1.0, 2, space)
    psi = space.basis_state((1, 0))
    times = np.linspace(0, 2, 9)
    a = evolve_state(H, psi, times)
    b = evolve_lindblad(H, [], psi, times)
    np.testing.assert_allclose(np.outer(a.last, a.last.conj()), b.last, atol=1e-10)


def test_on_the_fly_reductions_match_snapshots():
    space = SpaceDescriptor(2, 2, 1)
    params = model.RamanParams.identical(2, 1.0, 1.0, 20.0, 2.0)
    i = space.index((0, 1), 0)
    red = {"p": lambda s: float(abs(s[i]) ** 2)}
    tr = evolve_state(model.interaction_hamiltonian(params, space), space.basis_state((1, 0)),
                      np.linspace(0, 5, 11), reductions=red, store_states=True)
    np.testing.assert_allclose(tr.reductions["p"], tr.reduce(red["p"]), atol=1e-12)


def test_fidelity_helpers():
    space = SpaceDescriptor(1, 2, 0)
    a, b = space.basis_state((0,)), space.basis_state((1,))
    assert fidelity(a, a) == pytest.approx(1.0)
    assert fidelity(a.amplitudes, b) == 0
    assert fidelity(a.to_density().matrix, a) == pytest.approx(1.0)


def test_jump_rate_validation():
    space = SpaceDescriptor(1, 2, 0)
    with pytest.raises(ValueError):
        evolve_lindblad(np.zeros((2, 2)), [(-1.0, sigma_minus(space, 1))],
                        space.basis_state((1,)), [0, 1])
    with pytest.raises(ValueError):
        evolve_lindblad(np.zeros((2, 2)), [(1.0, np.eye(3))], space.basis_state((1,)), [0, 1])


def test_time_dependent_callable_source():
    space = SpaceDescriptor(1, 2, 0)
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    # H(t) = t X: rotation angle t^2/2
    tr = evolve_state(lambda t: t * X, space.basis_state((0,)), np.linspace(0, 2, 5))
    assert abs(tr.last[1]) ** 2 == pytest.approx(math.sin(2.0) ** 2, abs=1e-8)
    op = Operator(space, X, hermitian=True)
    tr2 = evolve_state(op, space.basis_state((0,)), [0, math.pi / 2])
    assert abs(tr2.last[1]) ** 2 == pytest.approx(1.0, abs=1e-9)

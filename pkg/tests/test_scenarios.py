import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvwgm import analytic, scenarios
from nvwgm.hilbert import SpaceDescriptor
from nvwgm.model import RamanParams, StirapParams
from nvwgm.pulses import stirap_schedule
from nvwgm.units import GHZ, MHZ, NS


@pytest.fixture(scope="module")
def qit_pair():
    p = scenarios.fig5_params().without_decay()
    return (scenarios.run_qit(1.0, 0.0, params=p), scenarios.run_qit(0.0, 1.0, params=p))


def test_w_state_report_shape():
    r = scenarios.run_w_state(4, n_points=101)
    table = r.tables["w_state"]
    assert list(table)[0] == "time_ns"
    assert r.passed and set(r.checks) >= {"analytic_match", "p_max_match", "gate_time_match"}
    assert r.metrics["p_max_observed"] == pytest.approx(0.75, abs=1e-9)
    assert r.metrics["t_max_observed_ns"] == pytest.approx(31.25)


def test_w_state_unitary_limit_and_trace():
    r = scenarios.run_w_state(4, gamma_eff=0.0, n_points=51)
    assert r.checks["unitary_limit"] and r.checks["trace_preserved"]


def test_w_state_decay_lowers_fidelity():
    ideal = scenarios.run_w_state(4, n_points=51)
    lossy = scenarios.run_w_state(4, gamma_eff_ratio=0.02, n_points=51)
    assert lossy.metrics["fidelity_at_gate"] < ideal.metrics["fidelity_at_gate"]
    assert lossy.metrics["fidelity_unconditional_at_gate"] < 1


def test_w_state_argument_errors():
    with pytest.raises(ValueError):
        scenarios.run_w_state(1)
    with pytest.raises(ValueError):
        scenarios.run_w_state(4, gamma_eff=0.1, gamma_eff_ratio=0.1)
    with pytest.raises(ValueError):
        scenarios.run_w_state(4, fidelity_convention="other")


def test_full_vs_effective_small():
    p = RamanParams.identical(2, GHZ, 100 * MHZ, 10 * GHZ, 100 * MHZ)
    r = scenarios.run_full_vs_effective(2, params=p, n_points=201)
    assert r.metrics["delta_over_eta"] == pytest.approx(5.02, abs=0.01)
    assert r.metrics["max_population_discrepancy"] < 0.25
    assert not r.warnings


def test_full_vs_effective_warns_when_invalid():
    p = RamanParams.identical(2, GHZ, 100 * MHZ, 5 * GHZ, 100 * MHZ)
    r = scenarios.run_full_vs_effective(2, params=p, n_points=51)
    assert r.warnings
    with pytest.raises(ValueError):
        scenarios.run_full_vs_effective(3, params=p)


def test_qit_linearity(qit_pair):
    # ideal evolution is linear: a superposition input maps to the same superposition
    c0, c1 = 0.6, 0.8j
    p = scenarios.fig5_params().without_decay()
    r = scenarios.run_qit(c0, c1, params=p)
    r0, r1 = qit_pair
    expect = c0 * r0.final_states["ideal"] + c1 * r1.final_states["ideal"]
    np.testing.assert_allclose(r.final_states["ideal"], expect, atol=1e-12)


def test_qit_transfers_excitation(qit_pair):
    r0, r1 = qit_pair
    assert r1.metrics["transfer_fidelity_ideal"] >= 0.98
    # |0_A 0_B 0_c> is dark for any pulses
    assert r0.metrics["transfer_fidelity_ideal"] == pytest.approx(1.0, abs=1e-12)
    assert r1.checks["guard_level_empty"]
    assert "pop_0A1B0c_top_dashed_decay" in r1.tables["qit"]
    with pytest.raises(ValueError):
        scenarios.run_qit(1.0, 1.0)


def test_bell_symmetric_deep_adiabatic():
    dtau = 5 * NS
    sch = stirap_schedule(20 / dtau, dtau, center_b=4 * dtau)
    p = StirapParams(GHZ, GHZ, sch.pulse_a, sch.pulse_b)
    r = scenarios.run_bell_stirap(p)
    assert r.metrics["fidelity_ideal"] >= 0.98
    assert r.metrics["success_probability_ideal"] == pytest.approx(
        r.metrics["success_probability_predicted"], abs=0.01)
    assert r.metrics["stop_time_ns"] == pytest.approx(22.5)
    table = r.tables["bell"]
    assert table["bell_fidelity_ideal"][-1] == pytest.approx(r.metrics["fidelity_ideal"], abs=1e-12)


def test_sweep_preserves_order():
    values = [0.02, 0.0, 0.01]
    out = scenarios.sweep("w_state", "gamma_eff_ratio", values, workers=3, n_points=41)
    assert [r.params["gamma_eff"] / r.params["gamma"] for r in out] == pytest.approx(values)
    with pytest.raises(ValueError):
        scenarios.sweep("w_state", "bogus", [1])


@settings(max_examples=5, deadline=None)
@given(st.permutations([0.0, 0.005, 0.01, 0.02]))
def test_sweep_permutation_invariance(perm):
    base = dict(n_points=41)
    ref = {v: r.metrics["fidelity_at_gate"]
           for v, r in zip(sorted(perm), scenarios.sweep("w_state", "gamma_eff_ratio",
                                                         sorted(perm), **base))}
    out = scenarios.sweep("w_state", "gamma_eff_ratio", perm, workers=2, **base)
    assert [r.metrics["fidelity_at_gate"] for r in out] == [ref[v] for v in perm]

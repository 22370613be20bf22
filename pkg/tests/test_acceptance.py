"""One test per acceptance criterion, each at its stated tolerance and runtime budget."""

import json
import math
import time

import numpy as np

from nvwgm import analytic, model, scenarios
from nvwgm.cli import main
from nvwgm.dynamics import IntegratorConfig, evolve_lindblad, population
from nvwgm.hilbert import SpaceDescriptor
from nvwgm.model import RamanParams, StirapParams
from nvwgm.pulses import GaussianPulse, stirap_schedule
from nvwgm.units import GHZ, MHZ, NS, US, round_sig

GAMMA = 4 * MHZ


def _verdict(criterion, number, checks, detail):
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    criterion(number, ok, detail + (f"  failed: {', '.join(failed)}" if failed else ""))
    assert ok, f"criterion {number} failed: {failed} ({detail})"


def test_c01_analytic_numeric_equivalence(criterion):
    t0 = time.perf_counter()
    r = scenarios.run_w_state(4, gamma=1.0, t_end=2 * math.pi, n_points=801)
    dt = time.perf_counter() - t0
    dev = r.metrics["max_abs_dev_analytic"]
    _verdict(criterion, 1, {"deviation": dev < 1e-8, "runtime": dt < 1.0},
             f"max |P_num - P_analytic| = {dev:.2e}, {dt:.2f} s")


def test_c02_w_state_table(criterion):
    printed = {4: (0.75, 0.0313), 6: (0.5556, 0.0208), 8: (0.4375, 0.0156)}
    checks, parts = {}, []
    t0 = time.perf_counter()
    for n, (p_printed, t_printed) in printed.items():
        r = scenarios.run_w_state(n, gamma=GAMMA, n_points=401)
        p, t_ns = r.metrics["p_max_observed"], r.metrics["t_max_observed_ns"]
        checks[f"p_max_N{n}"] = abs(p - analytic.p_max(n)) < 1e-9
        checks[f"p_printed_N{n}"] = round(p, 4) == p_printed
        checks[f"t_N{n}"] = round_sig(t_ns * NS / US, 3) == t_printed
        parts.append(f"N={n}: P={p:.10f} t={t_ns:.4f} ns")
    dt = time.perf_counter() - t0
    checks["runtime"] = dt < 5.0
    _verdict(criterion, 2, checks, "; ".join(parts) + f", {dt:.2f} s")


def test_c03_decay_ordering(criterion):
    t0 = time.perf_counter()
    t_end = math.pi / (4 * GAMMA)
    runs = {k: scenarios.run_w_state(4, gamma=GAMMA, t_end=t_end, gamma_eff_ratio=k, n_points=201)
            for k in (0.0, 1 / 200, 1 / 100, 1 / 50)}
    f = {k: r.tables["w_state"]["fidelity"][1:] for k, r in runs.items()}  # t in (0, pi/4gamma]
    ideal = scenarios.run_w_state(4, gamma=GAMMA, t_end=t_end, n_points=201)
    limit = runs[0.0].metrics["max_abs_dev_decay_vs_ideal"]
    ideal_f = ideal.tables["w_state"]["fidelity"]
    limit = max(limit, float(np.max(np.abs(runs[0.0].tables["w_state"]["fidelity"] - ideal_f))))
    ratios = np.linspace(0, 0.02, 9)
    sweep = scenarios.sweep("w_state", "gamma_eff_ratio", ratios, gamma=GAMMA, t_end=t_end,
                            n_points=201)
    at_gate = np.array([r.tables["w_state"]["fidelity"][-1] for r in sweep])
    dt = time.perf_counter() - t0
    checks = {
        "F_200_gt_F_100": bool(np.all(f[1 / 200] > f[1 / 100])),
        "F_100_gt_F_50": bool(np.all(f[1 / 100] > f[1 / 50])),
        "zero_rate_limit": limit < 1e-7,
        "sweep_non_increasing": bool(np.all(np.diff(at_gate) <= 0)),
        "runtime": dt < 30.0,
    }
    _verdict(criterion, 3, checks,
             f"F(pi/4gamma) = {f[1/200][-1]:.4f} > {f[1/100][-1]:.4f} > {f[1/50][-1]:.4f}, "
             f"zero-rate dev {limit:.1e}, {dt:.2f} s")


def test_c04_lindblad_oracle(criterion):
    t0 = time.perf_counter()
    rate = 0.37
    space = SpaceDescriptor(1, 2, 0)
    times = np.linspace(0, 5, 51)
    tr = evolve_lindblad(np.zeros((2, 2)), model.lindblad_jumps(rate, 1, space),
                         space.basis_state((1,)), times)
    err = float(np.max(np.abs(population(tr, 1) - np.exp(-2 * rate * times))))
    dt = time.perf_counter() - t0
    _verdict(criterion, 4, {"decay_law": err < 1e-7, "runtime": dt < 1.0},
             f"max |P1 - exp(-2 Gamma t)| = {err:.2e}, {dt:.2f} s")


def test_c05_dark_state_null(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20261015)
    space = SpaceDescriptor(2, 3, 2)
    worst = 0.0
    for g_a, g_b, om_a, om_b in rng.uniform(0.1, 10, size=(100, 4)):
        params = StirapParams(g_a, g_b, GaussianPulse(om_a, 0.0, 1.0), GaussianPulse(om_b, 0.0, 1.0))
        H = model.build_h_stirap(params, space, 0.0)
        worst = max(worst, float(np.linalg.norm(H @ analytic.dark_state(g_a, g_b, om_a, om_b, space))))
    dt = time.perf_counter() - t0
    _verdict(criterion, 5, {"null": worst < 1e-10, "runtime": dt < 1.0},
             f"max ||H|D>|| = {worst:.1e} over 100 draws, {dt:.2f} s")


def test_c06_qit_ideal(criterion):
    t0 = time.perf_counter()
    r = scenarios.run_qit(0.0, 1.0, params=scenarios.fig5_params().without_decay())
    dt = time.perf_counter() - t0
    m = r.metrics
    checks = {
        "final_transfer": m["final_pop_0A1B0c_ideal"] >= 0.98,
        "excited_peak": m["peak_excited_population"] <= 0.05,
        "guard_level": m["peak_guard_population"] <= 1e-6,
        "runtime": dt < 10.0,
    }
    _verdict(criterion, 6, checks,
             f"final |0A1B0c> {m['final_pop_0A1B0c_ideal']:.5f}, peak excited "
             f"{m['peak_excited_population']:.4f}, guard {m['peak_guard_population']:.1e}, {dt:.2f} s")


def test_c07_qit_decay(criterion):
    t0 = time.perf_counter()
    params = scenarios.fig5_params()
    assert params.kappa == params.gamma == GHZ / 10
    r = scenarios.run_qit(0.0, 1.0, params=params)
    dt = time.perf_counter() - t0
    m = r.metrics
    norms = r.tables["qit"]["norm_decay"]
    checks = {
        "below_ideal": m["final_pop_0A1B0c_decay"] < m["final_pop_0A1B0c_ideal"],
        "above_half": m["final_pop_0A1B0c_decay"] > 0.5,
        # 1e-14 absorbs last-bit roundoff in the norm itself
        "norm_non_increasing": bool(np.all(np.diff(norms) <= 1e-14)),
        "runtime": dt < 10.0,
    }
    _verdict(criterion, 7, checks,
             f"decay {m['final_pop_0A1B0c_decay']:.4f} vs ideal {m['final_pop_0A1B0c_ideal']:.4f}, "
             f"final norm {norms[-1]:.4f}, {dt:.2f} s")


def test_c08_asymmetric_bell(criterion):
    # deep adiabatic regime: Omega_m dtau = 20, g_B dtau = 2 pi x 5
    dtau = 5 * NS
    sch = stirap_schedule(20 / dtau, dtau, center_b=4 * dtau, role="bell")
    params = StirapParams(2 * GHZ, GHZ, sch.pulse_a, sch.pulse_b)
    t0 = time.perf_counter()
    r = scenarios.run_bell_stirap(params)
    dt = time.perf_counter() - t0
    f, target = r.metrics["fidelity_ideal"], analytic.bell_fidelity_asymmetric(2, 1)
    _verdict(criterion, 8, {"fidelity": abs(f - target) <= 0.03, "runtime": dt < 10.0},
             f"F = {f:.4f} vs predicted {target:.4f}, {dt:.2f} s")


def test_c09_full_vs_effective(criterion):
    t0 = time.perf_counter()
    g, Delta, delta = GHZ, 10 * GHZ, 100 * MHZ
    omega = model.omega_for_eta(delta / 50, g, Delta, delta)
    far = scenarios.run_full_vs_effective(4, RamanParams.identical(4, g, omega, Delta, delta))
    ref = scenarios.run_full_vs_effective(4)
    dt = time.perf_counter() - t0
    mf, mr = far.metrics, ref.metrics
    checks = {
        "discrepancy_far": mf["max_population_discrepancy"] < 0.02,
        "sustained_cavity_far": mf["mean_cavity_population"] < 1e-3,
        "discrepancy_reference": mr["max_population_discrepancy"] < 0.25,
        "runtime": dt < 60.0,
    }
    _verdict(criterion, 9, checks,
             f"delta/eta=50: disc {mf['max_population_discrepancy']:.4f}, mean cavity "
             f"{mf['mean_cavity_population']:.2e} (peak {mf['max_cavity_population']:.2e}); "
             f"delta/eta={mr['delta_over_eta']:.2f}: disc {mr['max_population_discrepancy']:.4f}, "
             f"{dt:.2f} s")


def test_c10_parameter_chain(criterion, tmp_path, capsys):
    t0 = time.perf_counter()
    code = main(["params", "--out", str(tmp_path)])
    dt = time.perf_counter() - t0
    capsys.readouterr()
    m = json.loads((tmp_path / "summary.json").read_text())["metrics"]
    checks = {
        "exit_status": code == 0,
        "kappa_2sf": round_sig(m["kappa_mhz_over_2pi"], 2) == 0.47,
        "eta_1pct": abs(m["eta_mhz_over_2pi"] / 20 - 1) <= 0.01,
        "gamma_1pct": abs(m["gamma_mhz_over_2pi"] / 4 - 1) <= 0.01,
        "runtime": dt < 1.0,
    }
    _verdict(criterion, 10, checks,
             f"kappa {m['kappa_mhz_over_2pi']:.4f}, eta {m['eta_mhz_over_2pi']:.4f}, "
             f"gamma {m['gamma_mhz_over_2pi']:.4f} (MHz over 2pi), {dt:.2f} s")

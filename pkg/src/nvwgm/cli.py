"""``nvwgm`` command line: run a scenario, write CSV tables and a JSON summary.

Exit status: 0 all checks pass, 1 a threshold check failed, 2 usage or
config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import model, scenarios
from .config import SCHEMA, ConfigError, RunConfig, parse_config, parse_value, to_boundary
from .dynamics import IntegrationError, IntegratorConfig
from .pulses import stirap_schedule
from .units import MHZ, NS, round_sig

EXIT_OK, EXIT_THRESHOLD, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

COMMANDS = {"w-state": "w_state", "full-vs-eff": "full_vs_eff", "bell": "bell", "qit": "qit",
            "sweep": "sweep", "params": "params"}

# printed values the parameter chain is compared against
REFERENCE_CHAIN = {"kappa": 0.47, "eta": 20.0, "gamma": 4.0}


# parameter assembly -------------------------------------------------------

def integrator_config(cfg: RunConfig) -> IntegratorConfig | None:
    kw = {}
    if cfg.get("integrator.method") not in (None, "rk4"):
        kw["method"] = cfg.get("integrator.method")
    if cfg.get("integrator.resolution") is not None:
        kw["resolution"] = cfg.get("integrator.resolution")
    if cfg.get("integrator.step") is not None:
        kw["step"] = cfg.get("integrator.step")
    if cfg.get("integrator.max_steps") is not None:
        kw["max_steps"] = cfg.get("integrator.max_steps")
    try:
        return IntegratorConfig(**kw) if kw else None
    except ValueError as exc:
        raise ConfigError(f"integrator: {exc}") from None


def raman_params(cfg: RunConfig) -> model.RamanParams:
    g, Delta, delta = cfg.get("raman.g"), cfg.get("raman.Delta"), cfg.get("raman.delta")
    omega = cfg.get("raman.omega")
    ratio = cfg.get("raman.delta_over_eta")
    if ratio is not None:
        omega = model.omega_for_eta(delta / ratio, g, Delta, delta)
    return model.RamanParams.identical(cfg.get("raman.n_sites"), g, omega, Delta, delta)


def stirap_params(cfg: RunConfig) -> model.StirapParams:
    dtau = cfg.get("stirap.dtau")
    peak = cfg.get("stirap.omega_m")
    if peak is None:
        peak = cfg.get("stirap.omega_m_dtau") / dtau
    tau_a, tau_b = cfg.get("stirap.tau_a"), cfg.get("stirap.tau_b")
    sch = stirap_schedule(peak, dtau, delay=tau_a - tau_b, role="qit", center_b=tau_b)
    g_a, g_b = cfg.get("stirap.g_a"), cfg.get("stirap.g_b")
    ratio = cfg.get("stirap.decay_over_g")
    g0 = min(g_a, g_b)
    kappa = cfg.get("stirap.kappa")
    gamma = cfg.get("stirap.gamma")
    kappa = ratio * g0 if kappa is None else kappa
    gamma = ratio * g0 if gamma is None else gamma
    return model.StirapParams(g_a, g_b, sch.pulse_a, sch.pulse_b, kappa=kappa, gamma=gamma)


def physical_constants(cfg: RunConfig) -> model.PhysicalConstants:
    return model.PhysicalConstants(
        wavelength=cfg.get("constants.wavelength"), gamma0=cfg.get("constants.gamma0"),
        Q=cfg.get("constants.Q"), mode_volume=cfg.get("constants.mode_volume"),
        field_ratio=cfg.get("constants.field_ratio"))


def _runs(cfg: RunConfig, scenario: str) -> list[tuple[str, dict]]:
    """(tag, runner kwargs) for every run a scenario config expands to."""
    integ = integrator_config(cfg)
    if scenario == "w_state":
        base = dict(gamma=cfg.get("w_state.gamma"), t_end=cfg.get("w_state.t_end"),
                    n_points=cfg.get("w_state.n_points"), config=integ,
                    fidelity_convention=cfg.get("w_state.fidelity_convention"))
        ratios = cfg.get("w_state.gamma_eff_over_gamma")
        if cfg.get("w_state.gamma_eff") is not None:
            if ratios is not None:
                raise ConfigError("set w_state.gamma_eff or w_state.gamma_eff_over_gamma, not both")
            base["gamma_eff"] = cfg.get("w_state.gamma_eff")
        out = []
        for n in cfg.get("w_state.n_sites"):
            for r in ratios if ratios is not None else [None]:
                tag = f"N{n}" + ("" if r is None else f"_ratio{r:g}")
                out.append((tag, base | {"n_sites": n, "gamma_eff_ratio": r}))
        return out
    if scenario == "full_vs_eff":
        p = raman_params(cfg)
        return [("", dict(n_sites=p.n_sites, params=p, t_end=cfg.get("full_vs_eff.t_end"),
                          n_points=cfg.get("full_vs_eff.n_points"),
                          n_max=cfg.get("full_vs_eff.n_max"), config=integ))]
    if scenario == "bell":
        return [("", dict(params=stirap_params(cfg), n_max=cfg.get("stirap.n_max"), config=integ))]
    if scenario == "qit":
        return [("", dict(c0=cfg.get("qit.c0"), c1=cfg.get("qit.c1"), params=stirap_params(cfg),
                          n_max=cfg.get("stirap.n_max"), t_end=cfg.get("qit.t_end"),
                          config=integ))]
    raise ConfigError(f"unknown scenario {scenario!r}")


def _sweep_runs(cfg: RunConfig) -> tuple[str, list[tuple[str, dict]]]:
    scenario = cfg.get("sweep.scenario").replace("-", "_")
    axis = cfg.get("sweep.axis")
    if scenario not in scenarios.SCENARIOS:
        raise ConfigError(f"sweep.scenario: unknown scenario {scenario!r}")
    if axis not in SCHEMA or axis.startswith(("sweep.", "run.")):
        raise ConfigError(f"sweep.axis: {axis!r} is not a sweepable config key")
    text = cfg.raw["sweep.values"][0]
    body, _, unit = text.rpartition(" ") if SCHEMA[axis].kind in ("frequency", "time", "length",
                                                                  "volume") else (text, "", "")
    items = [v.strip() for v in body.split(",") if v.strip()]
    if not items:
        raise ConfigError("sweep.values: no values")
    runs = []
    for k, item in enumerate(items):
        member = f"{item} {unit}".strip()
        sub = replace(cfg, scenario=scenario, values=dict(cfg.values), raw=dict(cfg.raw))
        sub.values[axis] = parse_value(axis, member, "sweep.values")
        sub.raw[axis] = (member, "sweep.values")
        members = _runs(sub, scenario)
        if len(members) != 1:
            raise ConfigError("sweep needs a base config that expands to a single run")
        runs.append((f"{k:03d}", members[0][1] | {"_sweep_value": member}))
    return scenario, runs


# output ---------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if x is None or isinstance(x, str):
        return x
    return repr(x)


def write_table(path: Path, table: dict[str, np.ndarray]) -> None:
    cols = list(table)
    if cols[0] != "time_ns":
        raise ValueError("first column must be time_ns")
    data = np.column_stack([np.real_if_close(np.asarray(table[c])).astype(float) for c in cols])
    lines = [",".join(cols)]
    lines += [",".join("%.17g" % v for v in row) for row in data]
    path.write_text("\n".join(lines) + "\n")


def read_table(path: str | Path) -> dict[str, np.ndarray]:
    """Inverse of :func:`write_table`."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {h: data[:, i] for i, h in enumerate(header)}


def _boundary_params(params: dict) -> dict:
    """Report parameters in MHz_over_2pi / ns where they carry those units."""
    freq = {"gamma", "gamma_eff", "g", "omega", "Delta", "delta", "g_a", "g_b", "omega_m",
            "kappa"}
    times = {"t_end", "t_start", "t_stop", "tau_a", "tau_b", "dtau"}
    out = {}
    for k, v in params.items():
        if v is not None and k in freq:
            out[f"{k}_mhz_over_2pi"] = v / MHZ
        elif v is not None and k in times:
            out[f"{k}_ns"] = v / NS
        else:
            out[k] = v
    return out


def _config_echo(cfg: RunConfig) -> dict:
    return {k: {"value": text, "source": src, "resolved": to_boundary(k, cfg.values[k])}
            for k, (text, src) in sorted(cfg.raw.items())}


def _emit(cfg: RunConfig, summary: dict, tables: dict[str, dict]) -> list[Path]:
    if cfg.out is None:
        return []
    try:
        cfg.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {cfg.out}: {exc}") from None
    written = []
    try:
        if "csv" in cfg.formats:
            for name, table in tables.items():
                p = cfg.out / f"{name}.csv"
                write_table(p, table)
                written.append(p)
        if "summary" in cfg.formats:
            p = cfg.out / "summary.json"
            p.write_text(json.dumps(_jsonable(summary), sort_keys=True, indent=2) + "\n")
            written.append(p)
    except OSError as exc:
        raise ConfigError(f"cannot write output in {cfg.out}: {exc}") from None
    return written


# commands -------------------------------------------------------------------

def parameter_chain(cfg: RunConfig) -> dict:
    """eta -> gamma, kappa, Gamma_eff and g_max, all in MHz_over_2pi."""
    const = physical_constants(cfg)
    p = raman_params(cfg)
    g, omega, Delta, delta = p.g[0], p.omega[0], p.Delta[0], p.delta[0]
    eta = model.eta(g, omega, Delta, delta)
    gamma = model.gamma_exchange(eta, delta)
    kappa = model.cavity_kappa(const.wavelength, const.Q)
    chain = {
        "g": g / MHZ, "omega": omega / MHZ, "Delta": Delta / MHZ, "delta": delta / MHZ,
        "eta": eta / MHZ, "gamma": gamma / MHZ, "kappa": kappa / MHZ,
        "gamma_eff": model.gamma_eff_spont(const.gamma0, omega, g, Delta) / MHZ,
        "g_max": model.g_max(const) / MHZ,
        "interaction_volume_um3": model.interaction_volume(const) / 1e-18,
        "delta_over_eta": delta / eta,
    }
    return chain


def run_params(cfg: RunConfig) -> tuple[dict, dict, dict]:
    chain = parameter_chain(cfg)
    metrics = {f"{k}_mhz_over_2pi" if k in ("g", "omega", "Delta", "delta", "eta", "gamma",
                                            "kappa", "gamma_eff", "g_max") else k: v
               for k, v in chain.items()}
    metrics["kappa_2sf"] = round_sig(chain["kappa"], 2)
    checks = {
        "kappa_two_significant_figures": metrics["kappa_2sf"] == REFERENCE_CHAIN["kappa"],
        "eta_within_1pct": abs(chain["eta"] / REFERENCE_CHAIN["eta"] - 1) <= 0.01,
        "gamma_within_1pct": abs(chain["gamma"] / REFERENCE_CHAIN["gamma"] - 1) <= 0.01,
    }
    for k in ("eta", "gamma"):
        metrics[f"{k}_rel_error_vs_printed"] = chain[k] / REFERENCE_CHAIN[k] - 1
    return metrics, checks, chain


def _print_chain(chain: dict, stream) -> None:
    print("parameter chain (frequencies as MHz over 2pi):", file=stream)
    for label, key in [("g", "g"), ("Omega", "omega"), ("Delta", "Delta"), ("delta", "delta"),
                       ("eta = g Omega (1/(Delta+delta) + 1/Delta)", "eta"),
                       ("gamma = eta^2/delta", "gamma"), ("kappa = 2 pi c/(lambda Q)", "kappa"),
                       ("Gamma_eff", "gamma_eff"), ("g_max", "g_max")]:
        print(f"  {label:<44} {chain[key]:.6g}", file=stream)
    print(f"  {'V_a (um^3)':<44} {chain['interaction_volume_um3']:.6g}", file=stream)
    print(f"  {'delta/eta':<44} {chain['delta_over_eta']:.6g}", file=stream)


def execute(cfg: RunConfig, stream=None) -> int:
    """Run ``cfg`` and write its outputs; returns the exit status."""
    stream = sys.stdout if stream is None else stream
    summary = {"scenario": cfg.scenario, "preset": cfg.preset, "seed": cfg.seed,
               "config": _config_echo(cfg), "overrides": list(cfg.overrides)}
    tables: dict[str, dict] = {}

    if cfg.scenario == "params":
        metrics, checks, chain = run_params(cfg)
        _print_chain(chain, stream)
        summary.update(metrics=metrics, checks=checks, passed=all(checks.values()), runs=[])
        _emit(cfg, summary, tables)
        return EXIT_OK if all(checks.values()) else EXIT_THRESHOLD

    if cfg.scenario == "sweep":
        scenario, runs = _sweep_runs(cfg)
        summary["sweep"] = {"scenario": scenario, "axis": cfg.get("sweep.axis"),
                            "values": [kw["_sweep_value"] for _, kw in runs]}
    else:
        scenario, runs = cfg.scenario, _runs(cfg, cfg.scenario)
    runner = scenarios.SCENARIOS[scenario]

    records = []
    for tag, kw in runs:
        swept = kw.pop("_sweep_value", None)
        report = runner(**kw)
        entry = {"name": report.name, "tag": tag, "params": _boundary_params(report.params),
                 "metrics": report.metrics, "checks": report.checks,
                 "warnings": report.warnings, "notes": report.notes,
                 "passed": report.passed, "tables": []}
        if swept is not None:
            entry["sweep_value"] = swept
        for tname, table in report.tables.items():
            fname = f"{scenario if cfg.scenario == 'sweep' else tname}{'_' + tag if tag else ''}"
            tables[fname] = table
            entry["tables"].append(f"{fname}.csv")
        records.append(entry)
        print(f"{report.name}{' ' + tag if tag else ''}: "
              f"{'PASS' if report.passed else 'FAIL'}", file=stream)
        for k, ok in report.checks.items():
            print(f"  [{'ok' if ok else 'FAIL'}] {k}", file=stream)
        for w in report.warnings:
            print(f"  warning: {w}", file=stream)

    passed = all(r["passed"] for r in records)
    summary.update(runs=records, passed=passed)
    _emit(cfg, summary, tables)
    return EXIT_OK if passed else EXIT_THRESHOLD


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nvwgm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--preset", help="fig2, fig3, fig5 or deep")
        p.add_argument("--config", help="flat 'key = value unit' file")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override one config key (repeatable)")
        p.add_argument("--out", help="output directory (nothing is written without it)")
        p.add_argument("--format", choices=("csv", "summary", "both"), default="both")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    formats = ("csv", "summary") if args.format == "both" else (args.format,)
    try:
        cfg = parse_config(COMMANDS[args.command], args.preset, args.config, args.overrides,
                           args.out, formats)
        return execute(cfg)
    except ConfigError as exc:
        print(f"nvwgm: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrationError as exc:
        print(f"nvwgm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"nvwgm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"nvwgm: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

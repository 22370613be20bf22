"""Run configuration: flat ``dotted.key = value unit`` text, presets and overrides.

Frequencies are written in "MHz over 2pi" (the number printed in front of
``2pi x ... MHz``), times in ns. Internally everything is rad/s and s.

Example::

    # fig5-like run with a slower pulse
    stirap.dtau = 2.5 ns
    stirap.omega_m_dtau = 6
    stirap.g_a = 1000 MHz_over_2pi
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .units import MHZ, NS, TWO_PI

UNITS = {
    "frequency": {"MHz_over_2pi": MHZ, "GHz_over_2pi": 1e3 * MHZ, "kHz_over_2pi": 1e-3 * MHZ,
                  "rad_per_s": 1.0},
    "time": {"ns": NS, "us": 1e3 * NS, "s": 1.0},
    "length": {"nm": 1e-9, "um": 1e-6, "m": 1.0},
    "volume": {"um3": 1e-18, "m3": 1.0},
}
BOUNDARY_UNIT = {"frequency": "MHz_over_2pi", "time": "ns", "length": "nm", "volume": "um3"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Key:
    kind: str  # a UNITS kind, or "float", "int", "str", "complex"
    default: str | None = None
    many: bool = False  # comma-separated list allowed


SCHEMA: dict[str, Key] = {
    # W state
    "w_state.n_sites": Key("int", "4", many=True),
    "w_state.gamma": Key("frequency", "4 MHz_over_2pi"),
    "w_state.gamma_eff": Key("frequency"),
    "w_state.gamma_eff_over_gamma": Key("float", many=True),
    "w_state.t_end": Key("time"),
    "w_state.n_points": Key("int", "401"),
    "w_state.fidelity_convention": Key("str", "conditional"),
    # Raman parameters, shared by full-vs-eff and params
    "raman.n_sites": Key("int", "4"),
    "raman.g": Key("frequency", "1000 MHz_over_2pi"),
    "raman.omega": Key("frequency", "100 MHz_over_2pi"),
    "raman.Delta": Key("frequency", "10000 MHz_over_2pi"),
    "raman.delta": Key("frequency", "100 MHz_over_2pi"),
    "raman.delta_over_eta": Key("float"),
    "full_vs_eff.t_end": Key("time"),
    "full_vs_eff.n_points": Key("int", "2001"),
    "full_vs_eff.n_max": Key("int", "1"),
    # STIRAP
    "stirap.g_a": Key("frequency", "1000 MHz_over_2pi"),
    "stirap.g_b": Key("frequency", "1000 MHz_over_2pi"),
    "stirap.omega_m": Key("frequency"),
    "stirap.omega_m_dtau": Key("float", "5"),
    "stirap.tau_a": Key("time", "6.8 ns"),
    "stirap.tau_b": Key("time", "5 ns"),
    "stirap.dtau": Key("time", "1.8 ns"),
    "stirap.kappa": Key("frequency"),
    "stirap.gamma": Key("frequency"),
    "stirap.decay_over_g": Key("float", "0.1"),
    "stirap.n_max": Key("int", "2"),
    "qit.c0": Key("complex", "0"),
    "qit.c1": Key("complex", "1"),
    "qit.t_end": Key("time"),
    # constants for the parameter chain
    "constants.wavelength": Key("length", "637 nm"),
    "constants.gamma0": Key("frequency", "83 MHz_over_2pi"),
    "constants.Q": Key("float", "1e9"),
    "constants.mode_volume": Key("volume", "100 um3"),
    "constants.field_ratio": Key("float", "1/6"),
    # sweeps
    "sweep.scenario": Key("str", "w_state"),
    "sweep.axis": Key("str", "w_state.gamma_eff_over_gamma"),
    "sweep.values": Key("str", "0, 0.005, 0.01, 0.015, 0.02"),
    # integrator and bookkeeping
    "integrator.method": Key("str", "rk4"),
    "integrator.resolution": Key("float"),
    "integrator.step": Key("time"),
    "integrator.max_steps": Key("int"),
    "run.seed": Key("int", "0"),  # reserved; every scenario is deterministic
}

PRESETS: dict[str, dict[str, str]] = {
    "fig2": {"w_state.n_sites": "4, 6, 8", "w_state.gamma": "4 MHz_over_2pi"},
    "fig3": {"w_state.n_sites": "4", "w_state.gamma_eff_over_gamma": "0.02, 0.01, 0.005",
             "sweep.scenario": "w_state", "sweep.axis": "w_state.gamma_eff_over_gamma",
             "sweep.values": "0, 0.0025, 0.005, 0.0075, 0.01, 0.0125, 0.015, 0.0175, 0.02"},
    "fig5": {"stirap.g_a": "1000 MHz_over_2pi", "stirap.g_b": "1000 MHz_over_2pi",
             "stirap.omega_m_dtau": "5", "stirap.tau_a": "6.8 ns", "stirap.tau_b": "5 ns",
             "stirap.dtau": "1.8 ns", "stirap.decay_over_g": "0.1", "qit.t_end": "12 ns"},
    "deep": {"stirap.dtau": "5 ns", "stirap.omega_m_dtau": "20", "stirap.tau_b": "20 ns",
             "stirap.tau_a": "25 ns"},
}


@dataclass
class RunConfig:
    scenario: str
    values: dict[str, object]  # SI values, keyed like SCHEMA
    raw: dict[str, tuple[str, str]]  # key -> (text as given, where it came from)
    preset: str | None = None
    out: Path | None = None
    formats: tuple[str, ...] = ("csv", "summary")
    seed: int = 0
    overrides: list[str] = field(default_factory=list)

    def get(self, key):
        return self.values.get(key)


_UNIT_RE = re.compile(r"^(?P<body>.*?)\s+(?P<unit>[A-Za-z][A-Za-z0-9_]*)$")


def _parse_number(text: str, kind: str):
    text = text.strip()
    if kind == "int":
        return int(text)
    if kind == "complex":
        return complex(text.replace(" ", ""))
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def parse_value(key: str, text: str, where: str = "") -> object:
    """Turn ``'4 MHz_over_2pi'`` into SI for ``key``; errors name the key and location."""
    loc = f" ({where})" if where else ""
    if key not in SCHEMA:
        raise ConfigError(f"unknown key {key!r}{loc}")
    entry = SCHEMA[key]
    text = text.strip()
    if entry.kind == "str":
        return text
    m = _UNIT_RE.match(text)
    body, unit = (m.group("body"), m.group("unit")) if m else (text, None)
    if entry.kind in UNITS:
        if unit is None:
            raise ConfigError(
                f"{key}: missing unit{loc}; expected one of {', '.join(UNITS[entry.kind])}")
        if unit not in UNITS[entry.kind]:
            raise ConfigError(f"{key}: unit {unit!r} is not a {entry.kind} unit{loc}")
        factor, kind = UNITS[entry.kind][unit], "float"
    else:
        if unit is not None and entry.kind != "complex":
            raise ConfigError(f"{key}: dimensionless value takes no unit, got {unit!r}{loc}")
        if unit is not None:
            body = text  # e.g. "0.6+0.8j" is not a unit
        factor, kind = 1.0, entry.kind
    parts = [p for p in body.split(",")] if entry.many else [body]
    try:
        vals = [_parse_number(p, kind) for p in parts]
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r}{loc}") from None
    vals = [v * factor if factor != 1.0 else v for v in vals]
    if any(isinstance(v, float) and not math.isfinite(v) for v in vals):
        raise ConfigError(f"{key}: non-finite value{loc}")
    return vals if entry.many else vals[0]


def read_config_text(text: str, source: str = "<config>") -> dict[str, tuple[str, str]]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"malformed line, expected 'key = value' ({where})")
        key, value = (s.strip() for s in line.split("=", 1))
        if key != "scenario":
            parse_value(key, value, where)
        out[key] = (value, where)
    return out


def parse_config(
    scenario: str,
    preset: str | None = None,
    config_file: str | Path | None = None,
    overrides: list[str] = (),
    out: str | Path | None = None,
    formats: tuple[str, ...] = ("csv", "summary"),
) -> RunConfig:
    """Resolve defaults < preset < config file < ``--set`` overrides."""
    raw: dict[str, tuple[str, str]] = {
        k: (v.default, "default") for k, v in SCHEMA.items() if v.default is not None
    }
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
        raw.update({k: (v, f"preset:{preset}") for k, v in PRESETS[preset].items()})
    if config_file is not None:
        path = Path(config_file)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from None
        entries = read_config_text(text, str(path))
        file_scenario = entries.pop("scenario", None)
        if file_scenario is not None and file_scenario[0].replace("-", "_") != scenario:
            raise ConfigError(
                f"config selects scenario {file_scenario[0]!r} but command is {scenario!r} "
                f"({file_scenario[1]})")
        raw.update(entries)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        parse_value(key, value, "--set")
        raw[key] = (value, "--set")
    values = {k: parse_value(k, v, where) for k, (v, where) in raw.items()}
    return RunConfig(scenario, values, raw, preset, Path(out) if out else None,
                     tuple(formats), int(values.get("run.seed", 0)), list(overrides))


def to_boundary(key: str, value):
    """SI value back to the units used in config files."""
    kind = SCHEMA[key].kind if key in SCHEMA else None
    if kind in BOUNDARY_UNIT:
        f = UNITS[kind][BOUNDARY_UNIT[kind]]
        return [v / f for v in value] if isinstance(value, list) else value / f
    return value


__all__ = ["ConfigError", "RunConfig", "SCHEMA", "PRESETS", "parse_config", "parse_value",
           "read_config_text", "to_boundary", "TWO_PI"]

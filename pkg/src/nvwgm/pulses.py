"""Gaussian laser envelopes and counterintuitive STIRAP scheduling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# a pulse counts as "off" below this fraction of its peak
OFF_FRACTION = 1e-3


@dataclass(frozen=True)
class GaussianPulse:
    """``peak * exp(-(t - center)**2 / waist**2)``; peak in rad/s, times in s."""

    peak: float
    center: float
    waist: float

    def __post_init__(self):
        if self.peak < 0:
            raise ValueError("pulse peak must be non-negative")
        if self.waist <= 0:
            raise ValueError("pulse waist must be positive")

    def __call__(self, t):
        return self.peak * np.exp(-(((t - self.center) / self.waist) ** 2))

    evaluate = __call__

    def off_after(self, fraction=OFF_FRACTION) -> float:
        """First time after the center where the envelope falls to ``fraction * peak``."""
        return self.center + self.waist * math.sqrt(-math.log(fraction))


def evaluate(pulse: GaussianPulse, t):
    return pulse(t)


class Schedule(NamedTuple):
    pulse_a: GaussianPulse
    pulse_b: GaussianPulse
    t_start: float
    t_stop: float
    role: str

    @property
    def crossing(self) -> float:
        return 0.5 * (self.pulse_a.center + self.pulse_b.center)


def stirap_schedule(peak, waist, delay=None, role="qit", center_b=5e-9, t_start=0.0) -> Schedule:
    """Counterintuitive pulse pair: the B pulse precedes A by ``delay``.

    ``role="bell"`` stops at the crossing point where both Rabi frequencies
    are equal; ``role="qit"`` stops once both pulses are off.
    """
    delay = waist if delay is None else delay
    if delay <= 0:
        raise ValueError("pulse delay must be positive")
    pulse_b = GaussianPulse(peak, center_b, waist)
    pulse_a = GaussianPulse(peak, center_b + delay, waist)
    if role == "bell":
        t_stop = 0.5 * (pulse_a.center + pulse_b.center)
    elif role == "qit":
        t_stop = max(pulse_a.off_after(), pulse_b.off_after())
    else:
        raise ValueError(f"unknown schedule role {role!r}")
    if t_stop <= t_start:
        raise ValueError("schedule stops before it starts")
    return Schedule(pulse_a, pulse_b, t_start, t_stop, role)


@dataclass(frozen=True)
class AdiabaticityReport:
    area: float  # Omega_m * dtau
    coupling_area: float  # g * dtau
    coupling_ratio: float  # g / Omega_m
    thresholds: tuple[float, float, float]

    @property
    def checks(self) -> dict[str, bool]:
        t1, t2, t3 = self.thresholds
        # 1e-9 slack: Omega_m is often defined as area / dtau and must round-trip
        return {
            "omega_dtau": self.area >= t1 * (1 - 1e-9),
            "g_dtau": self.coupling_area >= t2 * (1 - 1e-9),
            "g_over_omega": self.coupling_ratio >= t3 * (1 - 1e-9),
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def adiabaticity_check(params, thresholds=(5.0, 10.0, 2.0)) -> AdiabaticityReport:
    """Compare Omega_m*dtau, g*dtau and g/Omega_m against ``thresholds``.

    Uses the weaker coupling and the stronger pulse, i.e. the worst case.
    """
    peak = max(params.pulse_a.peak, params.pulse_b.peak)
    waist = min(params.pulse_a.waist, params.pulse_b.waist)
    g = min(params.g_a, params.g_b)
    ratio = g / peak if peak > 0 else math.inf
    return AdiabaticityReport(peak * waist, g * waist, ratio, tuple(thresholds))

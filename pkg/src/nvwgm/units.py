"""Unit helpers.

Everything inside the package is stored in SI with angular frequencies
(rad/s) and times in seconds. The user-facing boundary uses "MHz over
2pi", i.e. a frequency printed as ``2pi x 4 MHz`` is the number 4.
"""

import math
from decimal import ROUND_HALF_UP, Decimal

TWO_PI = 2.0 * math.pi

MHZ = TWO_PI * 1e6  # one "2pi x MHz" in rad/s
GHZ = TWO_PI * 1e9
NS = 1e-9
US = 1e-6

SPEED_OF_LIGHT = 299_792_458.0


def from_mhz(value):
    return value * MHZ


def to_mhz(omega):
    return omega / MHZ


def from_ns(value):
    return value * NS


def to_ns(t):
    return t / NS


def round_sig(x, digits, snap=10):
    """Round ``x`` to ``digits`` significant figures, half away from zero.

    The value is first snapped to ``snap`` significant figures so that a
    float sitting one ulp below a decimal tie (1/32 = 0.03125 computed as
    0.0312499999...) rounds the way the printed decimal would.
    """
    if x == 0 or not math.isfinite(x):
        return x
    snapped = Decimal(f"{x:.{snap}g}")
    exponent = snapped.adjusted() - digits + 1
    return float(snapped.quantize(Decimal(1).scaleb(exponent), rounding=ROUND_HALF_UP))

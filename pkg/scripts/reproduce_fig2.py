"""W-state success probability for N = 4, 6, 8 at gamma = 2pi x 4 MHz.

Writes one CSV per N plus summary.json and prints the (P_max, t_N) table.
"""

import argparse
import json
from pathlib import Path

from nvwgm.cli import main
from nvwgm.units import NS, US, round_sig

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--out", default="out/fig2")
args = parser.parse_args()

code = main(["w-state", "--preset", "fig2", "--out", args.out])
summary = json.loads((Path(args.out) / "summary.json").read_text())
print(f"{'N':>3} {'P_max':>8} {'t_N (us)':>9}")
for run in summary["runs"]:
    m = run["metrics"]
    t_us = round_sig(m["t_max_observed_ns"] * NS / US, 3)
    print(f"{run['params']['n_sites']:>3} {m['p_max_observed']:8.4f} {t_us:9.4f}")
raise SystemExit(code)

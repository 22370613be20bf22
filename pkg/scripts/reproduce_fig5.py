"""Quantum information transfer A -> B with the reference pulse set.

The CSV header names the curve roles (top/bottom panel, solid/dotted/dashed).
The exit status is nonzero because the peak excited population exceeds 0.05.
"""

import argparse
import json
from pathlib import Path

from nvwgm.cli import main

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--out", default="out/fig5")
args = parser.parse_args()

code = main(["qit", "--preset", "fig5", "--out", args.out])
m = json.loads((Path(args.out) / "summary.json").read_text())["runs"][0]["metrics"]
for key in ("final_pop_0A1B0c_ideal", "final_pop_0A1B0c_decay", "peak_excited_population",
            "peak_guard_population", "final_norm_decay"):
    print(f"{key:>26} {m[key]:.6f}")
raise SystemExit(code)

"""Bell fidelity against pulse area and waist, for g_A / g_B = 1 and 2.

This scan motivated the "deep" preset (dtau = 5 ns, Omega_m dtau = 20).
"""

import argparse

from nvwgm.analytic import bell_fidelity_asymmetric
from nvwgm.model import StirapParams
from nvwgm.pulses import stirap_schedule
from nvwgm.scenarios import run_bell_stirap
from nvwgm.units import GHZ, NS

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--ratios", type=float, nargs="+", default=[1.0, 2.0])
parser.add_argument("--dtau-ns", type=float, nargs="+", default=[1.8, 3.0, 5.0])
parser.add_argument("--areas", type=float, nargs="+", default=[5.0, 10.0, 20.0])
args = parser.parse_args()

print(f"{'gA/gB':>6} {'dtau ns':>8} {'area':>5} {'F':>8} {'F_pred':>7} {'P_succ':>7} {'peak e':>7}")
for ratio in args.ratios:
    for dtau_ns in args.dtau_ns:
        for area in args.areas:
            dtau = dtau_ns * NS
            sch = stirap_schedule(area / dtau, dtau, center_b=4 * dtau, role="bell")
            r = run_bell_stirap(StirapParams(ratio * GHZ, GHZ, sch.pulse_a, sch.pulse_b))
            m = r.metrics
            print(f"{ratio:6.2f} {dtau_ns:8.2f} {area:5.1f} {m['fidelity_ideal']:8.4f} "
                  f"{bell_fidelity_asymmetric(ratio, 1):7.4f} "
                  f"{m['success_probability_ideal']:7.4f} {m['peak_excited_population']:7.4f}")

"""Print the eta -> gamma, kappa, Gamma_eff and g_max chain from the default constants."""

import sys

from nvwgm.cli import main

sys.exit(main(["params", *sys.argv[1:]]))

"""
Non-convex energies on six sites
================================

Six sites in a plane, each with an attractive site
potential. We list the ground energy for every electron count N and check
whether N -> E[V, N] is convex.
"""

import numpy as np

from coulomb_sites import V_STAR, certify_counterexample, diamond, energy_profile
from coulomb_sites.cli import format_table

###############################################################################
# Two sites on each axis of a stretched diamond, plus two off-axis sites.
cfg = diamond()
print(np.round(cfg.points, 4))

###############################################################################
# Ground energies and the occupied sites (1-based labels).
profile = energy_profile(cfg, V_STAR)
print(format_table(profile))

###############################################################################
# The three-electron energy sits above the chord between N = 2 and N = 4.
# The certificate recomputes the three energies by plain enumeration.
report = certify_counterexample(cfg, V_STAR, 3)
print(f"E2, E3, E4 = {np.round(report.energies, 6)}")
print(f"midpoint (E2 + E4) / 2 = {report.midpoint:.6f}")
print(f"margin E3 - midpoint   = {report.margin:.6f}  passed: {report.passed}")

###############################################################################
# The lower convex envelope is what a grand-canonical ensemble achieves.
for N in range(7):
    print(N, f"{profile.energies[N]: .5f}", f"{profile.envelope[N]: .5f}")

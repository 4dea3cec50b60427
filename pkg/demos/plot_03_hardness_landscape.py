"""
Hardness landscape
==================

The hardness eta = (E[N-1] + E[N+1]) / 2 - E[N] is negative exactly where
convexity fails. We scan it on a plane of symmetric potentials and then let
a compass search push it down.
"""

import numpy as np

from coulomb_sites import V_GC, diamond, hardness, hardness_grid, minimize_hardness

cfg = diamond()

###############################################################################
# A coarse text rendering of the sign of eta with v5 = v6 = -2 fixed.
rows = hardness_grid(cfg, (1.9, 2.4), (1.2, 1.6), (41, 21))
eta = np.array([r[2] for r in rows]).reshape(41, 21)
for j in reversed(range(21)):
    print("".join("-" if e < -1e-9 else ("0" if abs(e) <= 1e-9 else "+") for e in eta[:, j]))
print("horizontal |v1| in [1.9, 2.4], vertical |v3| in [1.2, 1.6]")

###############################################################################
# Starting at the flat dual potential, move the symmetric pairs together.
print(f"eta at start: {hardness(cfg, V_GC).eta:.2e}")
best = minimize_hardness(cfg, V_GC, N=3, frozen=[4, 5], tied=[[0, 1], [2, 3]])
print(f"eta after {best.evaluations} evaluations: {best.eta:.6f}")
print("potential:", np.round(best.potential.values, 4))

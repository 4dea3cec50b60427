"""
Searching for other geometries
==============================

Random six-point configurations rarely show a functional gap. Perturbing a
known counterexample shows how wide the region is.
"""

import numpy as np

from coulomb_sites import diamond, random_geometry_search

###############################################################################
# Uniform sampling of a box: gaps are rare.
uniform = random_geometry_search(6, 300, box_halfwidth=2.0, seed=0)
print(f"uniform box: {len(uniform)} of 300 samples with a positive gap")

###############################################################################
# Gaussian jitter around the diamond.
for jitter in (0.02, 0.05, 0.1):
    hits = random_geometry_search(6, 300, seed=0, center=diamond(), jitter=jitter)
    best = hits[0].gap if hits else 0.0
    print(f"jitter {jitter:<4}: {len(hits):3d} hits, largest gap {best:.5f}")

###############################################################################
# The best jittered geometry, ready to paste into a config file.
hits = random_geometry_search(6, 300, seed=0, center=diamond(), jitter=0.05)
print(np.round(hits[0].config.points[:, :2], 4).tolist())

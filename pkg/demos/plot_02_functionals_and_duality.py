"""
Canonical and grand-canonical functionals
=========================================

At half filling the best three-electron ensemble costs more interaction
energy than the best ensemble with a fluctuating electron number. A dual
potential turns this gap into a convexity counterexample.
"""

import numpy as np

from coulomb_sites import (
    DIAMOND_REFLECTIONS,
    canonical_energy,
    canonical_functional,
    diamond,
    dual_potential,
    gc_functional,
    half_filling,
)

cfg = diamond()
rho = half_filling(6)

###############################################################################
# Both functionals are small linear programs over occupation probabilities.
F, ens = canonical_functional(cfg, rho, 3)
F_gc, ens_gc = gc_functional(cfg, rho)
print("canonical support:", {o.label(): round(p, 6) for o, p in ens.probs.items()})
print("grand-canonical support:", {o.label(): round(p, 6) for o, p in ens_gc.probs.items()})
print(f"F = {F:.6f}, F_GC = {F_gc:.6f}, gap = {F - F_gc:.6f} ({100 * (F - F_gc) / F:.2f}%)")

###############################################################################
# The optimal dual face is degenerate. Three ways to pick a point of it:
for selection in ("basis", "central", "flat"):
    cert = dual_potential(cfg, rho, DIAMOND_REFLECTIONS, selection)
    v = cert.potential.values
    E = [canonical_energy(cfg, v, N)[0] for N in (2, 3, 4)]
    print(f"{selection:>7}: v = {np.round(v, 4)}  E2, E3, E4 = {np.round(E, 5)}")

###############################################################################
# The "flat" representative makes E2 = E3 = E4: the potential sits exactly
# on the boundary of the non-convex region.

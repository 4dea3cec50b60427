"""Grand-canonical functional, energy at fixed mean particle number, and dual potentials."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .canonical import _check_density, _density_rows, _ensemble, total_energies
from .core import ExternalPotential, Occupation, SiteConfiguration, popcounts, subset_sums
from .errors import InfeasibleDensity, MassOutOfRange, NumericalBreakdown, SiteModelError
from .simplex import LinearProgram, solve_inequality_lp, solve_lp

ACTIVE_TOL = 1e-8
GAP_TOL = 1e-7
SELECTIONS = ("basis", "central", "flat")


def _gc_solve(config: SiteConfiguration, rho):
    K = config.K
    dens = _check_density(rho, K)
    r = np.clip(dens.rho, 0.0, 1.0)
    masks = np.arange(1 << K)
    A, b = _density_rows(K, masks, r)
    sol = solve_lp(LinearProgram(config.energies, A, b))
    if not sol.optimal:  # cannot happen for rho in the unit box
        raise InfeasibleDensity(f"no grand-canonical state has density {r.tolist()}")
    return r, sol


def gc_functional(config: SiteConfiguration, rho):
    """Least average interaction over all ensembles (any electron number) with density ``rho``.

    Returns ``(value, ensemble)``.
    """
    _, sol = _gc_solve(config, rho)
    return sol.objective_value, _ensemble(np.arange(1 << config.K), sol.primal)


def gc_energy(config: SiteConfiguration, V, lam: float) -> float:
    """Grand-canonical ground energy at mean particle number ``lam``."""
    K = config.K
    if not 0 <= lam <= K:
        raise MassOutOfRange(f"mean particle number {lam} outside [0, {K}]")
    n = popcounts(K).astype(float)
    A = np.vstack([np.ones(1 << K), n])
    sol = solve_lp(LinearProgram(total_energies(config, V), A, [1.0, lam]))
    return sol.objective_value


@dataclass(frozen=True)
class DualCertificate:
    """Potential whose grand-canonical ground states include one with the target density.

    ``gc_ground_energy`` is min_I (c_I + sum_{i in I} v_i); strong duality says
    it minus sum_k v_k rho_k equals the grand-canonical functional, and
    ``gap_check`` measures the mismatch.
    """

    potential: ExternalPotential
    gc_ground_energy: float
    functional: float
    gap_check: float
    active: list[Occupation] = field(default_factory=list)
    selection: str = "basis"

    @property
    def face_dimension(self) -> int:
        """Number of subsets whose dual constraint is active (degeneracy indicator)."""
        return len(self.active)

    def to_dict(self) -> dict:
        return {
            "potential": self.potential.values.tolist(),
            "gc_ground_energy": self.gc_ground_energy,
            "functional": self.functional,
            "gap_check": self.gap_check,
            "active_subsets": [o.mask for o in self.active],
            "active_count": self.face_dimension,
            "selection": self.selection,
        }


def symmetry_group(perms: Sequence[Sequence[int]], K: int) -> list[tuple[int, ...]]:
    """Closure of the given site permutations under composition (identity included)."""
    gens = []
    for p in perms:
        p = tuple(int(i) for i in p)
        if sorted(p) != list(range(K)):
            raise SiteModelError(f"{p} is not a permutation of {K} sites")
        gens.append(p)
    identity = tuple(range(K))
    group = {identity}
    frontier = [identity]
    while frontier:
        g = frontier.pop()
        for h in gens:
            gh = tuple(g[h[i]] for i in range(K))
            if gh not in group:
                group.add(gh)
                frontier.append(gh)
    return sorted(group)


def _certificate(config, r, F, v, selection) -> DualCertificate:
    e = config.energies + subset_sums(v)
    g = float(e.min())
    active = [Occupation(int(m)) for m in np.flatnonzero(e <= g + ACTIVE_TOL)]
    gap = abs(F - (g - float(v @ r)))
    if gap > GAP_TOL:
        raise NumericalBreakdown(f"dual potential misses strong duality by {gap:.3g}")
    return DualCertificate(ExternalPotential(v), g, F, gap, active, selection)


def dual_potential(config: SiteConfiguration, rho, symmetry=None, selection: str = "basis"):
    """Extract a potential realizing the grand-canonical functional at ``rho`` by duality.

    ``selection`` picks a point of the (often degenerate) optimal dual face:

    * ``"basis"``: multipliers of the final simplex basis, orbit-averaged
      over ``symmetry`` when permutations are given.
    * ``"central"``: the point maximizing the smallest slack among subsets
      that are not active on the whole face, restricted to
      symmetry-invariant potentials.
    * ``"flat"``: as central, but additionally requires an N-electron subset
      (N the integer mean particle number) to reach the ground level, so the
      canonical energies at N-1, N, N+1 coincide when the optimal ensemble
      mixes N-1 and N+1 electrons. Among the admissible subsets the one
      giving the lowest ground level wins. Falls back to ``"central"`` when no
      N-subset can be made active or the mass is not integral.
    """
    if selection not in SELECTIONS:
        raise ValueError(f"selection must be one of {SELECTIONS}")
    K = config.K
    r, sol = _gc_solve(config, rho)
    F = sol.objective_value
    group = symmetry_group(symmetry or [], K)
    if selection == "basis":
        v = -sol.duals[1:]
        if len(group) > 1:
            v = np.mean([v[list(p)] for p in group], axis=0)
        return _certificate(config, r, F, v, selection)

    support = {int(m) for m in np.flatnonzero(sol.primal > 1e-9)}
    face = _DualFace(config, r, F, group)
    point, tight = face.center(support)
    if selection == "flat":
        mass = float(r.sum())
        N = int(round(mass))
        already_flat = any(popcounts(K)[m] == N for m in tight)
        if abs(mass - N) <= 1e-9 and 0 < N < K and not already_flat:
            best = None
            seen: set[int] = set()
            for m in np.flatnonzero(popcounts(K) == N):
                m = int(m)
                if m in tight or m in seen:
                    continue
                orbit = {_permute_mask(m, p) for p in group}
                seen |= orbit
                res = face.center(support, forced=orbit)
                if res is None:
                    continue
                x, _ = res
                key = (round(x[K], 10), -x[K + 1])
                if best is None or key < best[0]:
                    best = (key, x)
            if best is not None:
                point = best[1]
    return _certificate(config, r, F, point[:K], selection)


def _permute_mask(mask: int, perm) -> int:
    out = 0
    for k, src in enumerate(perm):
        if mask >> src & 1:
            out |= 1 << k
    return out


class _DualFace:
    """Optimal face of the dual LP: max g - v.rho  s.t.  g - v(I) <= c_I."""

    def __init__(self, config, rho, F, group):
        K = config.K
        self.K = K
        masks = np.arange(1 << K)
        self.bits = ((masks[:, None] >> np.arange(K)[None, :]) & 1).astype(float)
        self.c = config.energies
        self.rho = rho
        self.F = F
        eq = []
        for p in group:
            for k in range(K):
                if p[k] != k:
                    row = np.zeros(K + 2)
                    row[k], row[p[k]] = 1.0, -1.0
                    eq.append(row)
        self.sym_rows = eq

    def center(self, support, forced=frozenset(), cap: float = 10.0):
        """Lexicographic max-min-slack point of the face.

        Subsets active everywhere on the face are detected from the LP
        multipliers and excluded; the smallest remaining slack is maximized,
        the subsets that block it are frozen at that level, and the process
        repeats on the rest. Returns ``(x, tight)`` with x = (v, g, t) where t
        is the first (smallest) slack level, or None if ``forced`` subsets
        cannot all be active on the face.
        """
        K, n = self.K, 1 << self.K
        tight = set(support) | set(forced)
        level: dict[int, float] = {}
        base = np.hstack([-self.bits, np.ones((n, 1))])
        A_face = np.concatenate([self.rho, [-1.0, 0.0]])
        cap_row = np.zeros(K + 2)
        cap_row[-1] = 1.0
        eq_rows = list(self.sym_rows)
        eq_rhs = [0.0] * len(eq_rows)
        for m in sorted(forced):
            eq_rows.append(np.concatenate([base[m], [0.0]]))
            eq_rhs.append(self.c[m])
        A_eq = np.array(eq_rows) if eq_rows else None
        b_eq = np.array(eq_rhs) if eq_rows else None
        obj = np.zeros(K + 2)
        obj[-1] = -1.0
        first = None
        x = None
        while True:
            free = [m for m in range(n) if m not in tight and m not in level]
            if not free:
                break
            tcol = np.zeros(n)
            tcol[free] = 1.0
            shift = np.array([level.get(m, 0.0) for m in range(n)])
            A_ub = np.vstack([np.hstack([base, tcol[:, None]]), A_face, cap_row])
            b_ub = np.concatenate([self.c - shift, [-(self.F - 1e-9)], [cap]])
            _, xr, y_ub, _ = solve_inequality_lp(obj, A_ub, b_ub, A_eq, b_eq,
                                                 free=np.ones(K + 2, dtype=bool))
            if xr is None:
                if x is None:
                    return None
                break
            x = xr
            t = x[-1]
            if t < -1e-9:
                # negative slack: the forced subsets cannot all be active on the face
                return None
            blocking = {m for m in free if y_ub[m] < -1e-10}
            if t <= 1e-9:
                if not blocking:
                    break
                tight |= blocking
                continue
            if first is None:
                first = t
            if t >= cap - 1e-9 or not blocking:
                break
            for m in blocking:
                level[m] = t
        x = x.copy()
        x[-1] = 0.0 if first is None else first
        return x, tight

"""Hardness landscapes, counterexample searches and certification.

The hardness at N is ``eta = (E[N-1] + E[N+1]) / 2 - E[N]``; it is negative
exactly when N -> E[V, N] fails to be convex at N.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np

from .canonical import (
    EnergyProfile,
    _cardinality_index,
    canonical_functional,
    energy_profile,
)
from .core import (
    DensityVector,
    ExternalPotential,
    Occupation,
    SiteConfiguration,
    as_density,
    as_potential,
    configuration_energy,
)
from .errors import BadRange, CardinalityOutOfRange, CoincidentSites, SiteModelError
from .fixtures import diamond, half_filling
from .grandcanonical import gc_functional

CERTIFY_TOL = 1e-9
GRID_HEADER = ("v1_abs", "v3_abs", "eta")


@dataclass(frozen=True)
class HardnessResult:
    potential: ExternalPotential
    N: int
    eta: float
    profile: EnergyProfile
    evaluations: int = 1

    @property
    def certified(self) -> bool:
        return self.eta < -CERTIFY_TOL

    def to_dict(self) -> dict:
        return {
            "potential": self.potential.values.tolist(),
            "N": self.N,
            "eta": self.eta,
            "certified": self.certified,
            "evaluations": self.evaluations,
            "profile": self.profile.to_dict(),
        }


def _check_N(config, N):
    if not 1 <= N <= config.K - 1:
        raise CardinalityOutOfRange(f"hardness needs 1 <= N <= K-1, got N={N}, K={config.K}")


def _eta_function(config: SiteConfiguration, N: int) -> Callable[[np.ndarray], float]:
    idx = _cardinality_index(config.K)
    lo, mid, hi = idx[N - 1], idx[N], idx[N + 1]
    c = config.energies
    bits = ((np.arange(1 << config.K)[:, None] >> np.arange(config.K)) & 1).astype(float)

    def eta(v):
        e = c + bits @ v
        return 0.5 * (e[lo].min() + e[hi].min()) - e[mid].min()

    return eta


def hardness(config: SiteConfiguration, V, N: int = 3) -> HardnessResult:
    _check_N(config, N)
    pot = as_potential(V, config.K)
    prof = energy_profile(config, pot)
    E = prof.energies
    eta = 0.5 * (E[N - 1] + E[N + 1]) - E[N]
    return HardnessResult(pot, N, float(eta), prof)


def compass_search(f, x0, directions=None, step=1e-2, min_step=1e-6, max_evals=100_000):
    """Derivative-free compass search.

    Polls ``x +/- step * d`` over ``directions`` (default: coordinate axes) in
    order and moves to the first strict improvement; halves the step after an
    unsuccessful sweep and stops once it falls below ``min_step``. Returns
    ``(x, f(x), evaluations)``.
    """
    x = np.array(x0, dtype=float)
    dirs = np.eye(len(x)) if directions is None else np.asarray(directions, dtype=float)
    fx = f(x)
    evals = 1
    while step >= min_step and evals < max_evals:
        moved = False
        for d in dirs:
            for sgn in (1.0, -1.0):
                trial = x + sgn * step * d
                ft = f(trial)
                evals += 1
                if ft < fx:
                    x, fx, moved = trial, ft, True
                    break
                if evals >= max_evals:
                    break
            if moved or evals >= max_evals:
                break
        if not moved:
            step /= 2
    return x, fx, evals


def minimize_hardness(config: SiteConfiguration, start, N: int = 3, frozen=None, tied=None,
                      step: float = 1e-2, min_step: float = 1e-6,
                      max_evals: int = 100_000) -> HardnessResult:
    """Compass search on the potential to make the hardness at N as negative as possible.

    ``frozen`` site indices keep their starting value. ``tied`` is a list of
    index groups that move together (e.g. sites exchanged by a reflection);
    untied free sites move individually. Never returns worse than ``start``.
    """
    _check_N(config, N)
    v0 = as_potential(start, config.K).values
    frozen = set(frozen or ())
    groups = [sorted(set(g) - frozen) for g in (tied or ())]
    groups = [g for g in groups if g]
    grouped = {k for g in groups for k in g}
    groups += [[k] for k in range(config.K) if k not in frozen and k not in grouped]
    dirs = np.zeros((len(groups), config.K))
    for i, g in enumerate(groups):
        dirs[i, g] = 1.0
    eta = _eta_function(config, N)
    if len(dirs) == 0:
        x, evals = v0, 1
    else:
        x, _, evals = compass_search(eta, v0, dirs, step, min_step, max_evals)
    res = hardness(config, x, N)
    return HardnessResult(res.potential, N, res.eta, res.profile, evals)


def hardness_grid(config: SiteConfiguration, v1_range, v3_range, steps, fixed: float = -2.0,
                  N: int = 3) -> list[tuple[float, float, float]]:
    """Hardness over a rectangle of (|v1| = |v2|, |v3| = |v4|) with v5 = v6 = ``fixed``.

    Rows come out row-major: v1 outer, v3 inner.
    """
    if config.K != 6:
        raise BadRange(f"the hardness grid is defined for 6 sites, got {config.K}")
    n1, n3 = (steps, steps) if np.isscalar(steps) else steps
    if n1 < 2 or n3 < 2:
        raise BadRange("need at least 2 steps per axis")
    for lo, hi in (v1_range, v3_range):
        if not (0 < lo <= hi):
            raise BadRange(f"magnitude range must satisfy 0 < lo <= hi, got ({lo}, {hi})")
    _check_N(config, N)
    a = np.linspace(v1_range[0], v1_range[1], int(n1))
    b = np.linspace(v3_range[0], v3_range[1], int(n3))
    A, B = np.meshgrid(a, b, indexing="ij")
    V = np.zeros((A.size, 6))
    V[:, 0] = V[:, 1] = -A.ravel()
    V[:, 2] = V[:, 3] = -B.ravel()
    V[:, 4] = V[:, 5] = fixed
    bits = ((np.arange(64)[:, None] >> np.arange(6)) & 1).astype(float)
    E = config.energies[None, :] + V @ bits.T
    idx = _cardinality_index(6)
    eta = 0.5 * (E[:, idx[N - 1]].min(1) + E[:, idx[N + 1]].min(1)) - E[:, idx[N]].min(1)
    return [(float(x), float(y), float(z)) for x, y, z in zip(A.ravel(), B.ravel(), eta)]


def write_grid_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(GRID_HEADER)
        for r in rows:
            w.writerow([repr(float(x)) for x in r])


@dataclass(frozen=True, eq=False)
class GapSample:
    config: SiteConfiguration
    rho: DensityVector
    f_canonical: float
    f_gc: float

    @property
    def gap(self) -> float:
        return self.f_canonical - self.f_gc

    @property
    def relative_gap(self) -> float:
        return self.gap / self.f_canonical if self.f_canonical > 0 else math.nan

    @property
    def certified(self) -> bool:
        return self.gap > CERTIFY_TOL

    def to_dict(self) -> dict:
        return {
            "points": self.config.points.tolist(),
            "exponent_s": self.config.exponent_s,
            "rho": self.rho.rho.tolist(),
            "f_canonical": self.f_canonical,
            "f_gc": self.f_gc,
            "gap": self.gap,
            "relative_gap": None if math.isnan(self.relative_gap) else self.relative_gap,
        }


def gap_at_density(config: SiteConfiguration, rho, N: int) -> GapSample:
    """Canonical minus grand-canonical functional at ``rho``; positive gap certifies non-convexity."""
    dens = as_density(rho, config.K)
    f_can, _ = canonical_functional(config, dens, N)
    f_gc, _ = gc_functional(config, dens)
    return GapSample(config, dens, f_can, f_gc)


def diamond_gap(a: float, b: float, h: float) -> GapSample:
    return gap_at_density(diamond(a, b, h), half_filling(6), 3)


def _sample_gap(args):
    pts, rho, N, s = args
    try:
        cfg = SiteConfiguration(pts, s)
    except CoincidentSites:
        return None
    return gap_at_density(cfg, rho, N)


def random_geometry_search(K: int, trials: int, box_halfwidth: float = 2.0, seed: int = 0,
                           rho=None, planar: bool = True, exponent_s: float = 1.0,
                           keep_all: bool = False, jobs: int = 1,
                           center: SiteConfiguration | None = None,
                           jitter: float = 0.05) -> list[GapSample]:
    """Sample K random points in [-w, w]^2 (or ^3) and compare the functionals.

    With ``center`` the points are instead the center's sites plus Gaussian
    noise of width ``jitter`` in the sampled coordinates; counterexamples
    occupy a small region of configuration space, and uniform sampling of the
    box rarely lands in it.

    Defaults to half filling, which needs even K. Returns samples with a
    certified gap (all samples with ``keep_all``), sorted by gap descending,
    ties kept in trial order. All randomness is drawn up front from ``seed``,
    so the result does not depend on ``jobs``.
    """
    if rho is None:
        if K % 2:
            raise SiteModelError(f"half filling needs an even number of sites, got K={K}")
        rho = half_filling(K)
    rho = np.asarray(rho, dtype=float)
    mass = float(rho.sum())
    N = int(round(mass))
    if abs(mass - N) > 1e-9:
        raise SiteModelError(f"density mass {mass} is not an integer")
    if trials <= 0:
        return []
    rng = np.random.default_rng(seed)
    dim = 2 if planar else 3
    if center is not None:
        if center.K != K:
            raise SiteModelError(f"center has {center.K} sites, expected {K}")
        base = center.points[:, :dim]
        pts = base + rng.normal(scale=jitter, size=(trials, K, dim))
    else:
        pts = rng.uniform(-box_halfwidth, box_halfwidth, size=(trials, K, dim))
    tasks = [(p, rho, N, exponent_s) for p in pts]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            samples = list(pool.map(_sample_gap, tasks, chunksize=max(1, trials // (4 * jobs))))
    else:
        samples = [_sample_gap(t) for t in tasks]
    out = [s for s in samples if s is not None and (keep_all or s.certified)]
    return sorted(out, key=lambda s: -s.gap)


def minimize_position_hardness(config: SiteConfiguration, V, N: int = 3, step: float = 1e-2,
                               min_step: float = 1e-5, max_evals: int = 20_000):
    """Compass search over the planar site coordinates at fixed potential.

    Returns ``(config, HardnessResult)``. Moves that make sites coincide are
    rejected.
    """
    _check_N(config, N)
    pot = as_potential(V, config.K)
    xy0 = config.points[:, :2].ravel()
    z = config.points[:, 2]

    def eta(xy):
        try:
            cfg = SiteConfiguration(np.column_stack([xy.reshape(-1, 2), z]), config.exponent_s)
        except CoincidentSites:
            return math.inf
        return _eta_function(cfg, N)(pot.values)

    xy, _, evals = compass_search(eta, xy0, None, step, min_step, max_evals)
    best = SiteConfiguration(np.column_stack([xy.reshape(-1, 2), z]), config.exponent_s)
    res = hardness(best, pot, N)
    return best, HardnessResult(res.potential, N, res.eta, res.profile, evals)


@dataclass(frozen=True)
class CertificationReport:
    N: int
    energies: tuple[float, float, float]
    minimizers: tuple[list[Occupation], list[Occupation], list[Occupation]]
    midpoint: float
    margin: float

    @property
    def passed(self) -> bool:
        return self.margin > CERTIFY_TOL

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "energies": {str(self.N + d): e for d, e in zip((-1, 0, 1), self.energies)},
            "minimizers": {str(self.N + d): [o.mask for o in m]
                           for d, m in zip((-1, 0, 1), self.minimizers)},
            "midpoint": self.midpoint,
            "margin": self.margin,
            "passed": self.passed,
        }


def _brute_force_energy(config, v, n):
    best, arg = math.inf, []
    for sites in combinations(range(config.K), n):
        occ = Occupation.from_sites(sites)
        e = configuration_energy(config, occ) + sum(v[k] for k in sites)
        if e < best - 1e-9:
            best, arg = e, [occ]
        elif e <= best + 1e-9:
            arg.append(occ)
            best = min(best, e)
    return best, sorted(arg)


def certify_counterexample(config: SiteConfiguration, V, N: int) -> CertificationReport:
    """Recompute E at N-1, N, N+1 by plain enumeration and report the convexity margin.

    ``margin = E[N] - (E[N-1] + E[N+1]) / 2``; the certificate passes when it
    exceeds 1e-9.
    """
    _check_N(config, N)
    v = as_potential(V, config.K).values
    res = [_brute_force_energy(config, v, n) for n in (N - 1, N, N + 1)]
    E = tuple(float(e) for e, _ in res)
    mid = 0.5 * (E[0] + E[2])
    return CertificationReport(N, E, tuple(m for _, m in res), mid, E[1] - mid)

"""Randomized checks that canonical and grand-canonical functionals coincide.

Equality is known on at most four sites and on collinear sites. These
suites sample configurations and integer-mass densities and report the
largest |F - F_GC| seen. A further suite checks the simplex solver against
brute-force vertex enumeration.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canonical import canonical_functional
from .core import Occupation, SiteConfiguration, configuration_energy
from .grandcanonical import gc_functional
from .simplex import LinearProgram, solve_lp, verify_by_vertex_enumeration

EQUALITY_TOL = 1e-8


@dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: int
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_dict(self) -> dict:
        return {"name": self.name, "cases": self.cases, "max_deviation": self.max_deviation,
                "tolerance": self.tolerance, "passed": self.passed}


def random_integer_density(K: int, rng: np.random.Generator, N: int | None = None):
    """A random point of the N-hypersimplex as a mixture of N-subset indicators."""
    if N is None:
        N = int(rng.integers(0, K + 1))
    n_terms = int(rng.integers(1, 5))
    weights = rng.dirichlet(np.ones(n_terms))
    rho = np.zeros(K)
    for w in weights:
        rho[rng.choice(K, size=N, replace=False)] += w
    return np.clip(rho, 0.0, 1.0), N


def _random_points(rng, K, spread=1.0, min_dist=0.05):
    while True:
        pts = rng.uniform(-spread, spread, size=(K, 3))
        d = np.linalg.norm(pts[:, None] - pts[None], axis=-1) + np.eye(K)
        if d.min() > min_dist:
            return pts


def random_collinear_points(rng, K):
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    offset = rng.normal(size=3)
    while True:
        t = rng.uniform(-2, 2, size=K)
        if np.min(np.diff(np.sort(t))) > 0.05:
            return offset + t[:, None] * direction


def _functional_gap(cfg, rho, N):
    f_can, _ = canonical_functional(cfg, rho, N)
    f_gc, _ = gc_functional(cfg, rho)
    return abs(f_can - f_gc)


def four_site_suite(trials: int = 200, seed: int = 0, exponent_s: float = 1.0) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        cfg = SiteConfiguration(_random_points(rng, 4), exponent_s)
        rho, N = random_integer_density(4, rng)
        worst = max(worst, _functional_gap(cfg, rho, N))
    return SuiteResult("four_sites", trials, worst, EQUALITY_TOL)


def collinear_suite(trials: int = 200, seed: int = 0, max_K: int = 8) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        K = int(rng.integers(2, max_K + 1))
        cfg = SiteConfiguration(random_collinear_points(rng, K))
        rho, N = random_integer_density(K, rng)
        worst = max(worst, _functional_gap(cfg, rho, N))
    return SuiteResult("collinear", trials, worst, EQUALITY_TOL)


def exchange_identity_suite(trials: int = 200, seed: int = 0) -> SuiteResult:
    """c_{123} + c_{124} - c_{12} - c_{1234} = -|R_3 - R_4|^{-1} on random 4-site sets."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        cfg = SiteConfiguration(_random_points(rng, 4, min_dist=0.2))
        c = lambda *s: configuration_energy(cfg, Occupation.from_sites(s))
        lhs = c(0, 1, 2) + c(0, 1, 3) - c(0, 1) - c(0, 1, 2, 3)
        rhs = -1.0 / cfg.distances[2, 3]
        worst = max(worst, abs(lhs - rhs))
    return SuiteResult("exchange_identity", trials, worst, 1e-12)


def random_lp(rng: np.random.Generator, max_n: int = 16, max_m: int = 8) -> LinearProgram:
    """Small random standard-form LP; mostly feasible, some infeasible or unbounded."""
    n = int(rng.integers(2, max_n + 1))
    m = int(rng.integers(1, min(max_m, n) + 1))
    A = rng.integers(-5, 6, size=(m, n)).astype(float)
    if rng.random() < 0.8:
        x0 = rng.integers(0, 4, size=n) * (rng.random(n) < 0.5)
        b = A @ x0
    else:
        b = rng.integers(-10, 11, size=m).astype(float)
    c = rng.integers(-3, 8, size=n).astype(float)
    return LinearProgram(c, A, b)


def lp_oracle_suite(trials: int = 500, seed: int = 0) -> SuiteResult:
    """Simplex against brute-force vertex enumeration: status, objective and duality gap."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        lp = random_lp(rng)
        sol, ref = solve_lp(lp), verify_by_vertex_enumeration(lp)
        if sol.status is not ref.status:
            return SuiteResult("lp_oracle", trials, float("inf"), EQUALITY_TOL)
        if sol.optimal:
            scale = max(1.0, abs(ref.objective_value))
            worst = max(worst, abs(sol.objective_value - ref.objective_value) / scale,
                        abs(sol.objective_value - lp.rhs @ sol.duals) / scale)
    return SuiteResult("lp_oracle", trials, float(worst), EQUALITY_TOL)

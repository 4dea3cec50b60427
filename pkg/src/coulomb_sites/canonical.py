"""Canonical energies, the canonical density functional and convexity in N."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    DENSITY_TOL,
    EnsembleState,
    Occupation,
    SiteConfiguration,
    as_density,
    as_potential,
    popcounts,
    subset_sums,
)
from .errors import CardinalityOutOfRange, InfeasibleDensity
from .simplex import LinearProgram, solve_lp

TIE_TOL = 1e-9
CONVEXITY_TOL = 1e-12
MASS_TOL = 1e-9


class _Infinity:
    """Energy of an impossible placement (more electrons than sites).

    Compares above every real number but refuses arithmetic, so it can never
    leak into a sum as a float ``inf``.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __float__(self):
        raise TypeError("INFINITY has no float value")


INFINITY = _Infinity()


@lru_cache(maxsize=32)
def _cardinality_index(K: int) -> tuple[np.ndarray, ...]:
    pc = popcounts(K)
    return tuple(np.flatnonzero(pc == N) for N in range(K + 1))


def total_energies(config: SiteConfiguration, V) -> np.ndarray:
    """c_I + sum_{i in I} v_i for every mask I."""
    v = as_potential(V, config.K).values
    return config.energies + subset_sums(v)


def canonical_energy(config: SiteConfiguration, V, N: int, tie_tol: float = TIE_TOL):
    """Minimum of c_I + sum_{i in I} v_i over the N-element subsets, with all minimizers.

    Returns ``(energy, minimizers)``; minimizers are every subset within
    ``tie_tol`` of the minimum, in ascending mask order. For ``N > K`` the
    energy is the :data:`INFINITY` sentinel and the minimizer list is empty.
    """
    if N < 0:
        raise CardinalityOutOfRange(f"N={N} is negative")
    if N > config.K:
        as_potential(V, config.K)
        return INFINITY, []
    masks = _cardinality_index(config.K)[N]
    e = total_energies(config, V)[masks]
    best = float(e.min())
    return best, [Occupation(int(m)) for m in masks[e <= best + tie_tol]]


def _check_density(rho, K):
    dens = as_density(rho, K)
    if not dens.in_unit_box(DENSITY_TOL):
        raise InfeasibleDensity(f"density outside [0, 1]: {dens.rho.tolist()}")
    return dens


def canonical_functional(config: SiteConfiguration, rho, N: int):
    """Least average interaction over N-electron ensembles with density ``rho``.

    Returns ``(value, ensemble)``. The density mass must equal N within 1e-9;
    it is rescaled to exactly N before the solve.
    """
    K = config.K
    dens = _check_density(rho, K)
    if not 0 <= N <= K:
        raise InfeasibleDensity(f"N={N} electrons cannot sit on {K} sites")
    if abs(dens.mass - N) > MASS_TOL:
        raise InfeasibleDensity(f"density mass {dens.mass} differs from N={N}")
    r = np.clip(dens.rho, 0.0, 1.0)
    if N > 0:
        r = r * (N / r.sum())
    masks = _cardinality_index(K)[N]
    A, b = _density_rows(K, masks, r)
    sol = solve_lp(LinearProgram(config.energies[masks], A, b))
    if not sol.optimal:
        raise InfeasibleDensity(f"no {N}-electron state has density {dens.rho.tolist()}")
    return sol.objective_value, _ensemble(masks, sol.primal)


def _density_rows(K: int, masks: np.ndarray, rho: np.ndarray):
    """Normalization row followed by one row per site."""
    bits = (masks[None, :] >> np.arange(K)[:, None]) & 1
    A = np.vstack([np.ones(len(masks)), bits.astype(float)])
    return A, np.concatenate([[1.0], rho])


def _ensemble(masks, p, tol=1e-13) -> EnsembleState:
    p = np.clip(p, 0.0, None)
    keep = p > tol
    p = p / p[keep].sum()
    return EnsembleState.from_masks({int(m): float(q) for m, q in zip(masks[keep], p[keep])})


def lower_convex_envelope(values) -> np.ndarray:
    """Greatest convex sequence below ``values`` (points at x = 0, 1, ...)."""
    y = np.asarray(values, dtype=float)
    hull: list[int] = []
    for i in range(len(y)):
        # pop while the last hull point is not strictly below the chord
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            if (y[b] - y[a]) * (i - a) >= (y[i] - y[a]) * (b - a):
                hull.pop()
            else:
                break
        hull.append(i)
    return np.interp(np.arange(len(y)), hull, y[hull])


def _violations(E, tol=CONVEXITY_TOL) -> list[int]:
    E = [float(e) for e in E]
    return [N for N in range(1, len(E) - 1) if E[N] > (E[N - 1] + E[N + 1]) / 2 + tol]


@dataclass(frozen=True)
class EnergyProfile:
    """E[V, N] for N = 0..K, its minimizers, lower convex envelope and convexity defects."""

    energies: dict[int, float]
    minimizers: dict[int, list[Occupation]]
    envelope: dict[int, float]
    violations: list[int]

    def as_array(self) -> np.ndarray:
        return np.array([self.energies[N] for N in sorted(self.energies)])

    def to_dict(self) -> dict:
        return {
            "energies": {str(N): e for N, e in self.energies.items()},
            "minimizers": {str(N): [o.mask for o in occ] for N, occ in self.minimizers.items()},
            "envelope": {str(N): e for N, e in self.envelope.items()},
            "violations": list(self.violations),
        }


def energy_profile(config: SiteConfiguration, V) -> EnergyProfile:
    energies, minimizers = {}, {}
    for N in range(config.K + 1):
        energies[N], minimizers[N] = canonical_energy(config, V, N)
    E = [energies[N] for N in range(config.K + 1)]
    env = lower_convex_envelope(E)
    return EnergyProfile(
        energies=energies,
        minimizers=minimizers,
        envelope={N: float(env[N]) for N in range(config.K + 1)},
        violations=_violations(E),
    )


def convexity_check(profile) -> list[int]:
    """Particle numbers N at which E[N] exceeds the midpoint of its neighbours.

    Accepts an :class:`EnergyProfile` or a plain sequence E[0], E[1], ...;
    exact equality is not a violation.
    """
    if isinstance(profile, EnergyProfile):
        return _violations(profile.as_array())
    return _violations(profile)

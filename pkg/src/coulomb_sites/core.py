"""Sites, occupations, ensembles and the elementary energy formulas.

Sites are indexed from 0 internally. A classical electron configuration is a
subset of sites stored as an integer bitmask (bit ``k`` set means site ``k`` is
occupied), so the full power set of a K-site system is simply ``range(2**K)``
in ascending mask order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    CardinalityOutOfRange,
    CoincidentSites,
    SiteModelError,
    UnnormalizedEnsemble,
)

MAX_SITES = 20
COINCIDENCE_TOL = 1e-12
NORMALIZATION_TOL = 1e-10
DENSITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SiteConfiguration:
    """K distinct points in 3-space and the Riesz exponent of the repulsion.

    ``exponent_s = 1`` is Coulomb. Planar input (K x 2) is padded with z = 0.
    """

    points: np.ndarray
    exponent_s: float = 1.0

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] not in (2, 3):
            raise SiteModelError(f"points must have shape (K, 3), got {pts.shape}")
        if pts.shape[1] == 2:
            pts = np.hstack([pts, np.zeros((len(pts), 1))])
        if not 1 <= len(pts) <= MAX_SITES:
            raise SiteModelError(f"need 1 <= K <= {MAX_SITES} sites, got {len(pts)}")
        if not np.all(np.isfinite(pts)):
            raise SiteModelError("site coordinates must be finite")
        if not (self.exponent_s > 0 and math.isfinite(self.exponent_s)):
            raise SiteModelError(f"exponent_s must be positive, got {self.exponent_s}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "exponent_s", float(self.exponent_s))
        pair_distance_matrix(self)  # raises on coincident sites

    @property
    def K(self) -> int:
        return len(self.points)

    @cached_property
    def distances(self) -> np.ndarray:
        diff = self.points[:, None, :] - self.points[None, :, :]
        d = np.sqrt(np.sum(diff * diff, axis=-1))
        d.setflags(write=False)
        return d

    @cached_property
    def interaction(self) -> np.ndarray:
        """Pair kernel |R_j - R_k|^{-s} with a zero diagonal."""
        w = np.zeros((self.K, self.K))
        off = ~np.eye(self.K, dtype=bool)
        w[off] = self.distances[off] ** (-self.exponent_s)
        w.setflags(write=False)
        return w

    @cached_property
    def energies(self) -> np.ndarray:
        """c_I for every mask I in ascending order (length 2**K)."""
        c = np.zeros(1)
        for i in range(self.K):
            c = np.concatenate([c, c + subset_sums(self.interaction[i, :i])])
        c.setflags(write=False)
        return c

    def scaled(self, t: float) -> "SiteConfiguration":
        return SiteConfiguration(self.points * t, self.exponent_s)

    def permuted(self, perm: Sequence[int]) -> "SiteConfiguration":
        """New configuration whose site ``k`` is the old site ``perm[k]``."""
        return SiteConfiguration(self.points[list(perm)], self.exponent_s)


@dataclass(frozen=True, order=True)
class Occupation:
    """Set of occupied sites, one electron per site."""

    mask: int

    def __post_init__(self):
        object.__setattr__(self, "mask", int(self.mask))
        if self.mask < 0:
            raise SiteModelError("mask must be non-negative")

    @classmethod
    def from_sites(cls, sites: Iterable[int]) -> "Occupation":
        mask = 0
        for k in map(int, sites):
            if mask >> k & 1:
                raise SiteModelError(f"site {k} listed twice")
            mask |= 1 << k
        return cls(mask)

    @property
    def cardinality(self) -> int:
        return bin(self.mask).count("1")

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.mask.bit_length()) if self.mask >> k & 1)

    def __contains__(self, k: int) -> bool:
        return bool(self.mask >> k & 1)

    def label(self) -> str:
        """1-based site labels, e.g. ``{1,2}``."""
        return "{" + ",".join(str(k + 1) for k in self.sites) + "}"


@dataclass(frozen=True, eq=False)
class ExternalPotential:
    """Per-site potential values v_k in Hartree (negative is attractive)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(v)):
            raise SiteModelError("potential values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return len(self.values)

    def shifted(self, const: float) -> "ExternalPotential":
        return ExternalPotential(self.values + const)


@dataclass(frozen=True, eq=False)
class DensityVector:
    """Site occupation probabilities rho_k in [0, 1]."""

    rho: np.ndarray

    def __post_init__(self):
        r = np.array(self.rho, dtype=float).reshape(-1)
        if not np.all(np.isfinite(r)):
            raise SiteModelError("density values must be finite")
        r.setflags(write=False)
        object.__setattr__(self, "rho", r)

    @property
    def mass(self) -> float:
        return float(np.sum(self.rho))

    def in_unit_box(self, tol: float = DENSITY_TOL) -> bool:
        return bool(np.all(self.rho >= -tol) and np.all(self.rho <= 1 + tol))

    def __len__(self) -> int:
        return len(self.rho)


@dataclass(frozen=True)
class EnsembleState:
    """Probability distribution over occupations."""

    probs: Mapping[Occupation, float] = field(default_factory=dict)

    @classmethod
    def from_masks(cls, probs: Mapping[int, float]) -> "EnsembleState":
        return cls({Occupation(int(m)): float(p) for m, p in probs.items()})

    @classmethod
    def deterministic(cls, occ: Occupation) -> "EnsembleState":
        return cls({occ: 1.0})

    @property
    def total(self) -> float:
        return float(sum(self.probs.values()))

    def check_normalized(self, tol: float = NORMALIZATION_TOL) -> None:
        if any(p < -tol for p in self.probs.values()) or abs(self.total - 1) > tol:
            raise UnnormalizedEnsemble(f"probabilities sum to {self.total!r}")

    def support(self, tol: float = 1e-12) -> list[Occupation]:
        return sorted(o for o, p in self.probs.items() if p > tol)

    def mask_probs(self) -> dict[int, float]:
        return {o.mask: p for o, p in sorted(self.probs.items())}


def as_potential(V, K: int) -> ExternalPotential:
    pot = V if isinstance(V, ExternalPotential) else ExternalPotential(V)
    if len(pot) != K:
        raise SiteModelError(f"potential has {len(pot)} values for {K} sites")
    return pot


def as_density(rho, K: int) -> DensityVector:
    dens = rho if isinstance(rho, DensityVector) else DensityVector(rho)
    if len(dens) != K:
        raise SiteModelError(f"density has {len(dens)} values for {K} sites")
    return dens


def subset_sums(values) -> np.ndarray:
    """Sum of ``values[i]`` over bits of every mask ``0 .. 2**len(values) - 1``."""
    out = np.zeros(1)
    for x in np.asarray(values, dtype=float):
        out = np.concatenate([out, out + x])
    return out


def popcounts(K: int) -> np.ndarray:
    return subset_sums(np.ones(K)).astype(np.int64)


def pair_distance_matrix(config: SiteConfiguration) -> np.ndarray:
    d = config.distances
    off = ~np.eye(config.K, dtype=bool)
    if np.any(d[off] <= COINCIDENCE_TOL):
        j, k = np.argwhere((d <= COINCIDENCE_TOL) & off)[0]
        raise CoincidentSites(f"sites {j} and {k} coincide")
    return d


def configuration_energy(config: SiteConfiguration, occ: Occupation | int) -> float:
    """Interaction energy c_I: sum over occupied pairs of |R_j - R_k|^{-s}."""
    occ = occ if isinstance(occ, Occupation) else Occupation(occ)
    if occ.mask >= 1 << config.K:
        raise CardinalityOutOfRange(f"mask {occ.mask} has sites beyond K={config.K}")
    w = config.interaction
    return float(sum(w[j, k] for j, k in combinations(occ.sites, 2)))


def enumerate_occupations(K: int, N: int | None = None) -> list[Occupation]:
    """All subsets of K sites (or those of cardinality N) in ascending mask order."""
    if K < 0 or K > MAX_SITES:
        raise CardinalityOutOfRange(f"K={K} outside 0..{MAX_SITES}")
    if N is None:
        return [Occupation(m) for m in range(1 << K)]
    if not 0 <= N <= K:
        raise CardinalityOutOfRange(f"N={N} outside 0..{K}")
    masks = sorted(sum(1 << k for k in c) for c in combinations(range(K), N))
    return [Occupation(m) for m in masks]


def ensemble_energy(config: SiteConfiguration, ens: EnsembleState, V=None) -> float:
    """Average of c_I (plus the potential energy of I when V is given)."""
    ens.check_normalized()
    v = None if V is None else as_potential(V, config.K).values
    total = 0.0
    for occ, p in ens.probs.items():
        e = configuration_energy(config, occ)
        if v is not None:
            e += float(sum(v[k] for k in occ.sites))
        total += p * e
    return total


def ensemble_density(ens: EnsembleState, K: int) -> DensityVector:
    ens.check_normalized()
    rho = np.zeros(K)
    for occ, p in ens.probs.items():
        if occ.mask >= 1 << K:
            raise CardinalityOutOfRange(f"mask {occ.mask} has sites beyond K={K}")
        rho[list(occ.sites)] += p
    return DensityVector(rho)

"""Leading-order predictions for far-apart nuclei with tiny fractional charges.

Placing nucleus j at ell * R_j with charge z_j = sqrt(2 |v_j| / ell) gives a
hydrogenic well of depth -z_j^2 / 2 = v_j / ell, comparable to the 1/ell
repulsion between electrons sitting in different wells. For large ell the
quantum N-electron energy is, to leading order, the best classical energy
with at most N electrons (extra electrons escape to infinity):

    E[V_ell, N] = min_{1 <= n <= min(N, K)} E_cl[V, n] / ell + o(1/ell).

The correction terms are only known as bounds (exponent -5/4 from below,
-3/2 from above) and are not computed here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .canonical import canonical_energy
from .core import SiteConfiguration, as_potential
from .errors import NonAttractivePotential, SiteModelError

BIND_TOL = 1e-9
ERROR_EXPONENTS = {"lower_bound": -5 / 4, "upper_bound": -3 / 2}


@dataclass(frozen=True, eq=False)
class ScaledNuclearSystem:
    ell: float
    positions: np.ndarray
    charges: np.ndarray

    @property
    def M(self) -> int:
        return len(self.charges)

    @property
    def well_energies(self) -> np.ndarray:
        """Hydrogenic ground-state energy -z^2/2 of each isolated nucleus."""
        return -0.5 * self.charges ** 2

    def to_dict(self) -> dict:
        return {"ell": self.ell, "positions": self.positions.tolist(),
                "charges": self.charges.tolist()}


def scale_system(config: SiteConfiguration, V, ell: float) -> ScaledNuclearSystem:
    if not ell > 0:
        raise SiteModelError(f"ell must be positive, got {ell}")
    v = as_potential(V, config.K).values
    if np.any(v >= 0):
        raise NonAttractivePotential(f"all site potentials must be negative, got {v.tolist()}")
    return ScaledNuclearSystem(float(ell), ell * config.points, np.sqrt(2 * np.abs(v) / ell))


def _classical_energies(config, V) -> list[float]:
    return [canonical_energy(config, V, n)[0] for n in range(config.K + 1)]


def leading_order_energy(config: SiteConfiguration, V, ell: float, N: int) -> float:
    if N < 1:
        raise SiteModelError(f"need N >= 1, got {N}")
    if not ell > 0:
        raise SiteModelError(f"ell must be positive, got {ell}")
    E = _classical_energies(config, V)
    return min(E[1:min(N, config.K) + 1]) / ell


def lieb_max_binding(system: ScaledNuclearSystem) -> int:
    """Lieb's bound: at most 2 Z + M electrons bind, Z the total nuclear charge."""
    return math.floor(2 * float(np.sum(system.charges))) + system.M


@dataclass(frozen=True)
class BindingEntry:
    N: int
    energy: float
    binds: bool
    n_min: int


@dataclass(frozen=True)
class BindingReport:
    ell: float
    entries: list[BindingEntry]

    @property
    def binding_numbers(self) -> list[int]:
        return [e.N for e in self.entries if e.binds]

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "binds": self.binding_numbers,
            "entries": [{"N": e.N, "energy": e.energy, "binds": e.binds, "n_min": e.n_min}
                        for e in self.entries],
            "error_exponents": dict(ERROR_EXPONENTS),
        }


def binding_report(config: SiteConfiguration, V, ell: float = 1.0,
                   n_max: int | None = None) -> BindingReport:
    """Leading-order energy and binding verdict for N = 1..n_max (default K + 1).

    An N-th electron binds when it strictly lowers the classical energy below
    every configuration with fewer electrons (the empty one included);
    otherwise it prefers to escape and no ground state exists.
    """
    if not ell > 0:
        raise SiteModelError(f"ell must be positive, got {ell}")
    E = _classical_energies(config, V)
    K = config.K
    n_max = K + 1 if n_max is None else n_max
    entries = []
    for N in range(1, n_max + 1):
        reachable = E[1:min(N, K) + 1]
        k = int(np.argmin(reachable))
        binds = N <= K and E[N] < min(E[:N]) - BIND_TOL
        entries.append(BindingEntry(N, reachable[k] / ell, bool(binds), k + 1))
    return BindingReport(float(ell), entries)


def step_profile(config: SiteConfiguration, V, Ns=None) -> list[tuple[int, float]]:
    """(N, ell * E[V_ell, N]) at leading order; independent of ell."""
    Ns = range(1, config.K + 2) if Ns is None else Ns
    return [(int(N), leading_order_energy(config, V, 1.0, N)) for N in Ns]

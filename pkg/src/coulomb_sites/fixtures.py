"""The six-site diamond and the potentials known on it."""
import math

import numpy as np

from .core import SiteConfiguration
from .errors import CoincidentSites, DegenerateGeometry

DIAMOND_A = 0.7
DIAMOND_B = 1.7
DIAMOND_H = math.sqrt(0.51)

# convexity-breaking potential, truncated at the fourth decimal
V_STAR = (-2.1665, -2.1665, -1.4109, -1.4109, -1.9934, -1.9934)
# symmetric dual potential at half filling, four decimals
V_GC = (-2.1731, -2.1731, -1.3977, -1.3977, -2.0, -2.0)

# x -> -x swaps sites 0<->1 and 2<->3; y -> -y swaps 4<->5
DIAMOND_REFLECTIONS = ((1, 0, 3, 2, 4, 5), (0, 1, 2, 3, 5, 4))

# E[V_STAR, N] to four decimals and the listed optimal sites (0-based)
REFERENCE_TABLE = {
    1: (-2.1665, (0,)),
    2: (-3.6187, (0, 1)),
    3: (-3.6129, (3, 4, 5)),
    4: (-3.6450, (2, 3, 4, 5)),
    5: (-2.3949, (1, 2, 3, 4, 5)),
    6: (-0.4304, (0, 1, 2, 3, 4, 5)),
}


def diamond_points(a: float = DIAMOND_A, b: float = DIAMOND_B, h: float = DIAMOND_H) -> np.ndarray:
    return np.array([
        [-a, 0.0, 0.0],
        [a, 0.0, 0.0],
        [b, 0.0, 0.0],
        [-b, 0.0, 0.0],
        [0.0, h, 0.0],
        [0.0, -h, 0.0],
    ])


def diamond(a: float = DIAMOND_A, b: float = DIAMOND_B, h: float = DIAMOND_H,
            exponent_s: float = 1.0) -> SiteConfiguration:
    """Sites (-a,0), (a,0), (b,0), (-b,0), (0,h), (0,-h); needs 0 < a < b and h > 0."""
    if not (0 < a < b and h > 0):
        raise DegenerateGeometry(f"diamond needs 0 < a < b and h > 0, got a={a}, b={b}, h={h}")
    try:
        return SiteConfiguration(diamond_points(a, b, h), exponent_s)
    except CoincidentSites as exc:
        raise DegenerateGeometry(f"diamond (a={a}, b={b}, h={h}): {exc}") from None


def half_filling(K: int) -> np.ndarray:
    return np.full(K, 0.5)

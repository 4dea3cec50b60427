"""Dense two-phase tableau simplex for ``min c.x  s.t.  A x = b, x >= 0``.

Bland's rule is always on: the grand-canonical programs built from symmetric
geometries are heavily degenerate. Dual multipliers are read off the final
basis inverse, which the tableau carries in the artificial columns, so the
reported duals are complementary to the reported primal by construction.

``solve_lp(lp, exact=True)`` reruns the same pivoting in rational arithmetic
(:class:`fractions.Fraction`); it is slow and meant for adjudicating ties in
tests.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import NumericalBreakdown, ProblemTooLarge, SiteModelError

PIVOT_TOL = 1e-10
BREAKDOWN_TOL = 1e-12


class LpStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True, eq=False)
class LinearProgram:
    objective: np.ndarray
    constraint_matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).reshape(-1)
        A = np.asarray(self.constraint_matrix, dtype=float)
        b = np.asarray(self.rhs, dtype=float).reshape(-1)
        if A.ndim != 2:
            A = A.reshape(len(b), len(c))
        if A.shape != (len(b), len(c)):
            raise SiteModelError(f"constraint matrix {A.shape} does not match "
                                 f"{len(b)} rows x {len(c)} columns")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise SiteModelError("linear program data must be finite")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraint_matrix", A)
        object.__setattr__(self, "rhs", b)

    @property
    def shape(self) -> tuple[int, int]:
        return self.constraint_matrix.shape


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    primal: np.ndarray | None
    objective_value: float | None
    duals: np.ndarray | None
    basis: tuple[int, ...] = ()
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    """Rows 0..m-1 hold B^{-1}[A | I | b]; row m holds reduced costs and -z."""

    def __init__(self, A, b, exact: bool):
        m, n = A.shape
        self.m, self.n = m, n
        self.exact = exact
        self.tol = 0 if exact else PIVOT_TOL
        dtype = object if exact else float
        T = np.zeros((m + 1, n + m + 1), dtype=dtype)
        if exact:
            T[:] = Fraction(0)
        T[:m, :n] = A
        for i in range(m):
            T[i, n + i] = 1 if not exact else Fraction(1)
        T[:m, -1] = b
        self.T = T
        self.basis = list(range(n, n + m))
        self.pivots = 0

    def set_costs(self, cost):
        T, m = self.T, self.m
        cB = np.array([cost[j] for j in self.basis], dtype=T.dtype)
        T[m, :-1] = cost - cB @ T[:m, :-1]
        T[m, -1] = -(cB @ T[:m, -1])

    def pivot(self, r: int, j: int):
        T = self.T
        piv = T[r, j]
        if abs(piv) < (0 if self.exact else BREAKDOWN_TOL):
            raise NumericalBreakdown(f"pivot {float(piv):.3e} at row {r}, column {j}")
        T[r, :] = T[r, :] / piv
        col = T[:, j].copy()
        col[r] = 0
        T -= np.outer(col, T[r, :])
        if not self.exact:
            T[:, j] = 0.0
            T[r, j] = 1.0
        self.basis[r] = j
        self.pivots += 1

    def run(self, allowed: int, max_pivots: int) -> bool:
        """Bland-rule iterations; entering columns restricted to ``< allowed``.

        Returns False when the program is unbounded along the entering column.
        """
        T, m, tol = self.T, self.m, self.tol
        while True:
            d = T[m, :allowed]
            neg = [j for j in range(allowed) if d[j] < -tol]
            if not neg:
                return True
            j = neg[0]
            col = T[:m, j]
            rows = [i for i in range(m) if col[i] > tol]
            if not rows:
                return False
            ratios = [T[i, -1] / col[i] for i in rows]
            best = min(ratios)
            slack = 0 if self.exact else 1e-12 * max(1.0, abs(float(best)))
            ties = [i for i, q in zip(rows, ratios) if q <= best + slack]
            r = min(ties, key=lambda i: self.basis[i])
            self.pivot(r, j)
            if self.pivots > max_pivots:
                raise NumericalBreakdown(f"no convergence after {max_pivots} pivots")


def solve_lp(lp: LinearProgram, exact: bool = False, max_pivots: int = 200_000) -> LpSolution:
    """Two-phase simplex; infeasibility and unboundedness are reported in the status."""
    c, A, b = lp.objective, lp.constraint_matrix, lp.rhs
    m, n = A.shape
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign
    if exact:
        conv = np.vectorize(Fraction, otypes=[object])
        A, b, c_work = conv(A), conv(b), conv(c)
        zero = Fraction(0)
    else:
        c_work = c.copy()
        zero = 0.0
    tab = _Tableau(A, b, exact)
    T = tab.T

    phase1 = np.array([zero] * n + [zero + 1] * m, dtype=T.dtype)
    tab.set_costs(phase1)
    tab.run(allowed=n + m, max_pivots=max_pivots)
    infeas = -T[m, -1]
    feas_tol = 0 if exact else 1e-9 * max(1.0, float(np.max(np.abs(b), initial=0.0)))
    if infeas > feas_tol:
        return LpSolution(LpStatus.INFEASIBLE, None, None, None, tuple(tab.basis), tab.pivots)

    # drive remaining artificials out; rows that cannot be pivoted are redundant
    for r in range(m):
        if tab.basis[r] >= n:
            cand = [j for j in range(n) if abs(T[r, j]) > tab.tol]
            if cand:
                tab.pivot(r, cand[0])

    phase2 = np.concatenate([c_work, np.array([zero] * m, dtype=T.dtype)])
    tab.set_costs(phase2)
    if not tab.run(allowed=n, max_pivots=max_pivots):
        return LpSolution(LpStatus.UNBOUNDED, None, None, None, tuple(tab.basis), tab.pivots)

    x = np.array([zero] * n, dtype=T.dtype)
    for i, j in enumerate(tab.basis):
        if j < n:
            x[j] = T[i, -1]
    y = -T[m, n:n + m] * sign.astype(T.dtype) if not exact else \
        np.array([-T[m, n + i] * int(sign[i]) for i in range(m)], dtype=object)
    obj = c_work @ x
    if not exact:
        x = np.where(np.abs(x) < 1e-14, 0.0, x)
        obj = float(obj)
        y = np.asarray(y, dtype=float)
    return LpSolution(LpStatus.OPTIMAL, x, obj, y, tuple(tab.basis), tab.pivots)


def solve_inequality_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, free=None):
    """Minimize ``c.x`` s.t. ``A_ub x <= b_ub``, ``A_eq x = b_eq``.

    Variables flagged in ``free`` are unrestricted in sign, the others are
    non-negative. Returns ``(solution, x, y_ub, y_eq)``; ``y_ub <= 0`` are the
    multipliers of the inequality rows (zero where the row is slack).
    """
    c = np.asarray(c, dtype=float)
    nv = len(c)
    A_ub = np.zeros((0, nv)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, nv)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    free = np.zeros(nv, dtype=bool) if free is None else np.asarray(free, dtype=bool)
    fidx = np.flatnonzero(free)
    n_ub = len(b_ub)
    # columns: x (shifted), negative parts of free vars, ub slacks
    A = np.block([
        [A_ub, -A_ub[:, fidx], np.eye(n_ub)],
        [A_eq, -A_eq[:, fidx], np.zeros((len(b_eq), n_ub))],
    ])
    cost = np.concatenate([c, -c[fidx], np.zeros(n_ub)])
    sol = solve_lp(LinearProgram(cost, A, np.concatenate([b_ub, b_eq])))
    if not sol.optimal:
        return sol, None, None, None
    z = sol.primal
    x = z[:nv].copy()
    x[fidx] -= z[nv:nv + len(fidx)]
    return sol, x, sol.duals[:n_ub], sol.duals[n_ub:]


def _independent_rows(A: np.ndarray, tol: float = 1e-9) -> list[int]:
    keep: list[int] = []
    for i in range(A.shape[0]):
        if np.linalg.matrix_rank(A[keep + [i]], tol=tol) == len(keep) + 1:
            keep.append(i)
    return keep


def verify_by_vertex_enumeration(lp: LinearProgram, tol: float = 1e-9) -> LpSolution:
    """Brute-force oracle: enumerate every basis of the row-reduced system.

    A basis that is both primal and dual feasible certifies optimality; if the
    program has feasible bases but none is dual feasible it is unbounded.
    """
    c, A, b = lp.objective, lp.constraint_matrix, lp.rhs
    m, n = A.shape
    if n > 24:
        raise ProblemTooLarge(f"n={n} > 24 columns")
    rows = _independent_rows(A)
    r = len(rows)
    if math.comb(n, r) > 5_000_000:
        raise ProblemTooLarge(f"C({n},{r}) bases is too many")
    Ar, br = A[rows], b[rows]
    if r < m:
        # rows dropped as dependent must still be consistent
        sol, *_ = np.linalg.lstsq(Ar.T, A.T, rcond=None)
        if np.max(np.abs(sol.T @ br - b), initial=0.0) > 1e-8:
            return LpSolution(LpStatus.INFEASIBLE, None, None, None)
    if r == 0:
        if np.any(c < -tol):
            return LpSolution(LpStatus.UNBOUNDED, None, None, None)
        return LpSolution(LpStatus.OPTIMAL, np.zeros(n), 0.0, np.zeros(m))

    combos = np.array(list(combinations(range(n), r)), dtype=np.intp)
    B = Ar[:, combos].transpose(1, 0, 2)  # (C, r, r)
    scale = max(1.0, float(np.max(np.abs(Ar))))
    ok = np.abs(np.linalg.det(B / scale)) > 1e-10
    combos, B = combos[ok], B[ok]
    if len(combos) == 0:
        return LpSolution(LpStatus.INFEASIBLE, None, None, None)
    xB = np.linalg.solve(B, np.broadcast_to(br, (len(B), r))[..., None])[..., 0]
    feasible = np.all(xB >= -tol, axis=1)
    if not feasible.any():
        return LpSolution(LpStatus.INFEASIBLE, None, None, None)
    combos, B, xB = combos[feasible], B[feasible], xB[feasible]
    cB = c[combos]
    y = np.linalg.solve(B.transpose(0, 2, 1), cB[..., None])[..., 0]  # (C, r)
    reduced = c[None, :] - y @ Ar
    dual_ok = np.all(reduced >= -1e-8, axis=1)
    if not dual_ok.any():
        return LpSolution(LpStatus.UNBOUNDED, None, None, None)
    objs = np.einsum("ij,ij->i", cB, xB)
    cand = np.flatnonzero(dual_ok)
    k = cand[np.argmin(objs[cand])]
    x = np.zeros(n)
    x[combos[k]] = np.maximum(xB[k], 0.0)
    duals = np.zeros(m)
    duals[rows] = y[k]
    return LpSolution(LpStatus.OPTIMAL, x, float(c @ x), duals, tuple(int(j) for j in combos[k]))

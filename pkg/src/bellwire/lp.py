"""Dense two-phase simplex for small equality-form linear programs.

Solves  min c.x  s.t.  A x = b, x >= 0  on dense tableaus. Problems here
are desk scale (hundreds of columns), so a plain tableau dominates
alternatives in simplicity and auditability. Bland's pivot rule is the
default because it guarantees termination on degenerate bases; Dantzig's
rule is available so membership verdicts can be re-derived with an
independent pivot order.

On infeasible instances the phase-1 dual vector y is returned; it
satisfies y.A <= 0 (componentwise over columns) and y.b > 0, i.e. it is a
Farkas certificate of infeasibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverFailure

#: Reduced costs above -RC_TOL count as optimal.
RC_TOL = 1e-11

#: Pivot elements must exceed PIV_TOL in the ratio test.
PIV_TOL = 1e-10

PIVOT_RULES = ("bland", "dantzig")


@dataclass(frozen=True)
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: float
    dual: np.ndarray | None
    phase1_objective: float
    iterations: int

    @property
    def feasible(self) -> bool:
        return self.status == "optimal"


def _choose_entering(obj_row: np.ndarray, allowed: np.ndarray, pivot: str) -> int | None:
    candidates = np.where(allowed & (obj_row < -RC_TOL))[0]
    if candidates.size == 0:
        return None
    if pivot == "bland":
        return int(candidates[0])
    return int(candidates[np.argmin(obj_row[candidates])])


def _choose_leaving(
    T: np.ndarray, basis: list[int], col: int, pivot: str
) -> int | None:
    m = len(basis)
    piv_col = T[:m, col]
    rhs = T[:m, -1]
    rows = np.where(piv_col > PIV_TOL)[0]
    if rows.size == 0:
        return None
    ratios = rhs[rows] / piv_col[rows]
    best = ratios.min()
    ties = rows[ratios <= best + 1e-12]
    if pivot == "bland":
        # smallest basis-variable index among minimum-ratio rows
        return int(ties[np.argmin([basis[i] for i in ties])])
    return int(ties[0])


def _pivot(T: np.ndarray, basis: list[int], row: int, col: int) -> None:
    T[row, :] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row, :])
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _iterate(
    T: np.ndarray,
    basis: list[int],
    allowed: np.ndarray,
    pivot: str,
    max_iter: int,
    iterations: int,
    phase1: bool = False,
) -> tuple[str, int]:
    m = len(basis)
    while True:
        col = _choose_entering(T[m, :-1], allowed, pivot)
        if col is None:
            return "optimal", iterations
        row = _choose_leaving(T, basis, col, pivot)
        if row is None:
            if phase1:
                # a ray cannot lower the phase-1 objective below zero, so
                # this column is numerical dust; bar it and move on
                allowed[col] = False
                continue
            return "unbounded", iterations
        _pivot(T, basis, row, col)
        iterations += 1
        if iterations > max_iter:
            raise SolverFailure(
                f"simplex exceeded {max_iter} pivots (rule={pivot})"
            )


def solve_lp(
    c: np.ndarray,
    A: np.ndarray,
    b: np.ndarray,
    *,
    pivot: str = "bland",
    feas_tol: float = 1e-9,
    max_iter: int = 200000,
) -> LpResult:
    """Minimize c.x subject to A x = b, x >= 0.

    Returns duals of the equality rows: the phase-2 multipliers when
    optimal, the Farkas certificate when infeasible.
    """
    if pivot not in PIVOT_RULES:
        raise SolverFailure(f"unknown pivot rule {pivot!r}")
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float).reshape(-1)
    m, n = A.shape
    if b.shape != (m,) or c.shape != (n,):
        raise SolverFailure("inconsistent LP dimensions")

    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign

    # Tableau: m constraint rows, one objective row; columns are the n
    # structural variables, m artificials, and the RHS.
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(n, n + m))

    # Phase 1: minimize the artificial total. Price out the basic
    # artificials so the objective row holds reduced costs.
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()

    allowed = np.ones(n + m, dtype=bool)
    status, iterations = _iterate(T, basis, allowed, pivot, max_iter, 0, phase1=True)
    z1 = -T[m, -1]
    if z1 > feas_tol:
        # Farkas dual of the sign-flipped system, mapped back.
        y = (1.0 - T[m, n : n + m]) * sign
        return LpResult("infeasible", None, float("nan"), y, float(z1), iterations)

    # Drive artificials out of the basis where possible; rows that cannot
    # be pivoted are redundant and stay inert (their structural entries
    # are all ~0, so later pivots never touch them).
    for i in range(m):
        if basis[i] >= n:
            structural = np.where(np.abs(T[i, :n]) > PIV_TOL)[0]
            if structural.size:
                _pivot(T, basis, i, int(structural[0]))

    # Phase 2 objective: artificial columns keep cost zero but are barred
    # from entering, so their reduced costs read off -y directly.
    T[m, :] = 0.0
    T[m, :n] = c
    for i, bi in enumerate(basis):
        if bi < n and c[bi] != 0.0:
            T[m, :] -= c[bi] * T[i, :]
    allowed = np.concatenate([np.ones(n, dtype=bool), np.zeros(m, dtype=bool)])
    status, iterations = _iterate(T, basis, allowed, pivot, max_iter, iterations)
    if status == "unbounded":
        return LpResult("unbounded", None, float("-inf"), None, float(z1), iterations)

    x = np.zeros(n)
    for i, bi in enumerate(basis):
        if bi < n:
            x[bi] = T[i, -1]
    y = -T[m, n : n + m] * sign
    return LpResult("optimal", x, float(-T[m, -1]), y, float(z1), iterations)


def lp_feasible(
    A: np.ndarray,
    b: np.ndarray,
    *,
    pivot: str = "bland",
    feas_tol: float = 1e-9,
    max_iter: int = 200000,
) -> LpResult:
    """Phase-1 feasibility of {x >= 0 : A x = b} with a zero objective."""
    return solve_lp(np.zeros(A.shape[1]), A, b, pivot=pivot, feas_tol=feas_tol,
                    max_iter=max_iter)

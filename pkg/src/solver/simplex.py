"""
Simplex Solver

This module solves the continuous relaxation of a flat programme with a dense
two-phase tableau. Phase one minimizes the artificial variables; phase two
optimizes the real objective from the feasible basis it leaves behind.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..models.flat import FlatModel, ObjectiveSense, Relation, Solution, SolveOptions, SolveStatus, VarDomain

# Setup logging
logger = logging.getLogger(__name__)

PIVOT_TOLERANCE = 1e-9
REDUCED_COST_TOLERANCE = 1e-9
DEGENERATE_STREAK = 50


class SimplexFailure(Exception):
    """Raised when the pivoting loop cannot make progress."""
    pass


@dataclass
class LpArrays:
    """Dense arrays of a flat programme, objective turned into a minimization."""
    cost: np.ndarray
    sign: float
    constant: float
    matrix: np.ndarray
    relations: List[Relation]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integer: np.ndarray

    @classmethod
    def from_flat(cls, model: FlatModel) -> "LpArrays":
        n, m = len(model.variables), len(model.constraints)
        sign = -1.0 if model.sense == ObjectiveSense.MAXIMIZE else 1.0
        cost = np.zeros(n)
        for j, coef in model.objective.items():
            cost[j] = sign * coef
        matrix = np.zeros((m, n))
        rhs = np.zeros(m)
        for i, row in enumerate(model.constraints):
            for j, coef in row.coefficients.items():
                matrix[i, j] = coef
            rhs[i] = row.rhs
        lower = np.array([v.lower for v in model.variables], dtype=float)
        upper = np.array([v.upper for v in model.variables], dtype=float)
        integer = np.array([v.domain != VarDomain.CONTINUOUS for v in model.variables], dtype=bool)
        return cls(cost, sign, model.objective_constant, matrix,
                   [row.relation for row in model.constraints], rhs, lower, upper, integer)

    def objective_at(self, x: np.ndarray) -> float:
        """Objective in the model's own sense."""
        return float(self.sign * (self.cost @ x)) + self.constant


@dataclass
class LpResult:
    status: SolveStatus
    x: Optional[np.ndarray] = None
    value: Optional[float] = None
    iterations: int = 0


class Tableau:
    """Dense simplex tableau; the last row holds reduced costs and -z."""

    def __init__(self, table: np.ndarray, basis: List[int], max_iterations: int):
        self.table = table
        self.basis = basis
        self.max_iterations = max_iterations
        self.iterations = 0

    @property
    def rows(self) -> int:
        return self.table.shape[0] - 1

    def pivot(self, r: int, c: int):
        T = self.table
        T[r] /= T[r, c]
        for i in range(T.shape[0]):
            if i != r and T[i, c] != 0.0:
                T[i] -= T[i, c] * T[r]
        self.basis[r] = c
        self.iterations += 1

    def price(self, cost: np.ndarray):
        """Install a cost vector and reduce it against the current basis."""
        T = self.table
        T[-1, :] = 0.0
        T[-1, :len(cost)] = cost
        for i, j in enumerate(self.basis):
            if T[-1, j] != 0.0:
                T[-1] -= T[-1, j] * T[i]

    def entering(self, allowed: np.ndarray, bland: bool) -> Optional[int]:
        reduced = self.table[-1, :-1]
        candidates = np.where(allowed & (reduced < -REDUCED_COST_TOLERANCE))[0]
        if len(candidates) == 0:
            return None
        if bland:
            return int(candidates[0])
        return int(candidates[np.argmin(reduced[candidates])])

    def leaving(self, c: int) -> Optional[int]:
        column = self.table[:-1, c]
        best, best_ratio = None, math.inf
        for i in range(self.rows):
            if column[i] <= PIVOT_TOLERANCE:
                continue
            ratio = self.table[i, -1] / column[i]
            if ratio < best_ratio - 1e-12:
                best, best_ratio = i, ratio
            elif abs(ratio - best_ratio) <= 1e-12 and self.basis[i] < self.basis[best]:
                best = i
        return best

    def optimize(self, allowed: np.ndarray) -> SolveStatus:
        """Pivot until optimal or unbounded; Dantzig first, Bland after a degenerate streak."""
        streak = 0
        bland = False
        while True:
            c = self.entering(allowed, bland)
            if c is None:
                return SolveStatus.OPTIMAL
            r = self.leaving(c)
            if r is None:
                return SolveStatus.UNBOUNDED
            if self.iterations >= self.max_iterations:
                raise SimplexFailure(f"iteration limit {self.max_iterations} reached")
            degenerate = abs(self.table[r, -1]) <= PIVOT_TOLERANCE
            self.pivot(r, c)
            streak = streak + 1 if degenerate else 0
            if streak > DEGENERATE_STREAK and not bland:
                logger.debug("Switching to Bland's rule after a degenerate streak")
                bland = True

    def values(self, count: int) -> np.ndarray:
        y = np.zeros(count)
        for i, j in enumerate(self.basis):
            if j < count:
                y[j] = self.table[i, -1]
        return y


def _standard_form(arrays: LpArrays, lower: np.ndarray, upper: np.ndarray):
    """
    Shift and split variables so every column is non-negative.

    Returns the column map M and shift s with x = s + M y, plus the rows,
    relations and right-hand sides over y (finite upper bounds become rows).
    """
    n = len(lower)
    columns: List[Tuple[int, float]] = []
    shift = np.zeros(n)
    bound_rows: List[Tuple[int, float]] = []
    for j in range(n):
        low, high = lower[j], upper[j]
        if np.isfinite(low):
            shift[j] = low
            columns.append((j, 1.0))
            if np.isfinite(high):
                bound_rows.append((len(columns) - 1, high - low))
        elif np.isfinite(high):
            shift[j] = high
            columns.append((j, -1.0))
        else:
            columns.append((j, 1.0))
            columns.append((j, -1.0))

    M = np.zeros((n, len(columns)))
    for k, (j, s) in enumerate(columns):
        M[j, k] = s

    A = arrays.matrix @ M
    b = arrays.rhs - arrays.matrix @ shift
    relations = list(arrays.relations)
    if bound_rows:
        extra = np.zeros((len(bound_rows), len(columns)))
        for r, (k, limit) in enumerate(bound_rows):
            extra[r, k] = 1.0
        A = np.vstack([A, extra])
        b = np.concatenate([b, [limit for _, limit in bound_rows]])
        relations += [Relation.LE] * len(bound_rows)
    return M, shift, A, np.asarray(b, dtype=float), relations


def solve_relaxation(arrays: LpArrays, lower: np.ndarray, upper: np.ndarray,
                     opts: SolveOptions) -> LpResult:
    """
    Solve min cost.x subject to the rows and the given variable bounds.

    Args:
        arrays (LpArrays): programme in array form
        lower (np.ndarray): per-variable lower bounds
        upper (np.ndarray): per-variable upper bounds
        opts (SolveOptions): tolerances

    Returns:
        LpResult: status, point in original variables and objective in the model's sense
    """
    if np.any(lower > upper):
        return LpResult(SolveStatus.INFEASIBLE)

    M, shift, A, b, relations = _standard_form(arrays, lower, upper)
    m, N = A.shape

    # Step 1: make every right-hand side non-negative
    A = A.copy()
    for i in range(m):
        if b[i] < 0:
            A[i] *= -1.0
            b[i] *= -1.0
            if relations[i] == Relation.LE:
                relations[i] = Relation.GE
            elif relations[i] == Relation.GE:
                relations[i] = Relation.LE

    # Step 2: slack, surplus and artificial columns
    n_slack = sum(1 for r in relations if r != Relation.EQ)
    n_art = sum(1 for r in relations if r != Relation.LE)
    width = N + n_slack + n_art
    table = np.zeros((m + 1, width + 1))
    table[:m, :N] = A
    table[:m, -1] = b
    basis: List[int] = []
    slack, art = N, N + n_slack
    for i, relation in enumerate(relations):
        if relation == Relation.LE:
            table[i, slack] = 1.0
            basis.append(slack)
            slack += 1
        elif relation == Relation.GE:
            table[i, slack] = -1.0
            table[i, art] = 1.0
            basis.append(art)
            slack += 1
            art += 1
        else:
            table[i, art] = 1.0
            basis.append(art)
            art += 1

    tableau = Tableau(table, basis, max_iterations=50 * (m + width) + 1000)
    artificial = np.zeros(width, dtype=bool)
    artificial[N + n_slack:] = True

    try:
        # Step 3: phase one
        if n_art:
            tableau.price(artificial.astype(float))
            tableau.optimize(np.ones(width, dtype=bool))
            infeasibility = -tableau.table[-1, -1]
            scale = 1.0 + (float(np.max(np.abs(b))) if m else 0.0)
            if infeasibility > max(opts.feasibility_tolerance, 1e-8) * scale:
                return LpResult(SolveStatus.INFEASIBLE, iterations=tableau.iterations)
            for i in range(m):
                if not artificial[tableau.basis[i]]:
                    continue
                row = tableau.table[i, :N + n_slack]
                candidates = np.where(np.abs(row) > PIVOT_TOLERANCE)[0]
                if len(candidates):
                    tableau.pivot(i, int(candidates[0]))
                # otherwise the row is redundant and its artificial stays at zero

        # Step 4: phase two
        cost = np.zeros(width)
        cost[:N] = arrays.cost @ M
        tableau.price(cost)
        status = tableau.optimize(~artificial)
    except SimplexFailure as exc:
        logger.warning(f"Simplex failed: {exc}")
        return LpResult(SolveStatus.NUMERICAL_FAILURE, iterations=tableau.iterations)

    if status == SolveStatus.UNBOUNDED:
        return LpResult(SolveStatus.UNBOUNDED, iterations=tableau.iterations)

    x = shift + M @ tableau.values(N)
    if not _feasible(arrays, x, lower, upper, opts.feasibility_tolerance):
        logger.warning("Simplex point fails the feasibility check")
        return LpResult(SolveStatus.NUMERICAL_FAILURE, iterations=tableau.iterations)
    return LpResult(SolveStatus.OPTIMAL, x=x, value=arrays.objective_at(x), iterations=tableau.iterations)


def _feasible(arrays: LpArrays, x: np.ndarray, lower: np.ndarray, upper: np.ndarray, tol: float) -> bool:
    """Scaled check of every row and bound at x."""
    for i, relation in enumerate(arrays.relations):
        row = arrays.matrix[i]
        activity = float(row @ x)
        scale = 1.0 + max(abs(arrays.rhs[i]), float(np.sum(np.abs(row * x))))
        gap = activity - arrays.rhs[i]
        if relation == Relation.LE and gap > tol * scale:
            return False
        if relation == Relation.GE and -gap > tol * scale:
            return False
        if relation == Relation.EQ and abs(gap) > tol * scale:
            return False
    slack = tol * (1.0 + np.abs(x))
    return bool(np.all(x >= lower - slack) and np.all(x <= upper + slack))


def solve_lp(model: FlatModel, opts: Optional[SolveOptions] = None) -> Solution:
    """
    Solve a flat programme as a linear programme.

    Integer and binary domains are relaxed to continuous variables within
    their bounds (binaries to [0, 1]); use solve_milp to enforce integrality.

    Args:
        model (FlatModel): programme to solve
        opts (SolveOptions): tolerances and limits

    Returns:
        Solution: objective_value is set iff the status is optimal
    """
    opts = opts or SolveOptions()
    arrays = LpArrays.from_flat(model)
    lower, upper = _relaxed_bounds(model, arrays)
    result = solve_relaxation(arrays, lower, upper, opts)
    logger.info(f"LP solve finished: {result.status.value} after {result.iterations} pivots")
    if result.status != SolveStatus.OPTIMAL:
        return Solution(status=result.status, iterations=result.iterations)
    return Solution(
        status=SolveStatus.OPTIMAL,
        objective_value=result.value,
        assignment=assignment_of(model, result.x),
        iterations=result.iterations,
    )


def _relaxed_bounds(model: FlatModel, arrays: LpArrays) -> Tuple[np.ndarray, np.ndarray]:
    lower, upper = arrays.lower.copy(), arrays.upper.copy()
    for j, variable in enumerate(model.variables):
        if variable.domain == VarDomain.BINARY:
            lower[j] = max(lower[j], 0.0)
            upper[j] = min(upper[j], 1.0)
    return lower, upper


def assignment_of(model: FlatModel, x: np.ndarray) -> dict:
    """Named assignment; values within 1e-12 of zero are cleaned to 0."""
    return {v.name: (0.0 if abs(x[j]) < 1e-12 else float(x[j])) for j, v in enumerate(model.variables)}

"""
Branch and Bound

This module enforces integrality on top of the simplex relaxation with a
best-first search over variable bounds.
"""

import heapq
import logging
import math
import time
from itertools import count
from typing import List, Optional, Tuple

import numpy as np

from .simplex import LpArrays, LpResult, assignment_of, solve_lp, solve_relaxation
from ..models.flat import FlatModel, Solution, SolveOptions, SolveStatus, VarDomain

# Setup logging
logger = logging.getLogger(__name__)


class Node:
    """A subproblem: bounds plus the optimal relaxation under them."""

    def __init__(self, lower: np.ndarray, upper: np.ndarray, relaxation: LpResult, depth: int = 0):
        self.lower = lower
        self.upper = upper
        self.relaxation = relaxation
        self.depth = depth

    @property
    def bound(self) -> float:
        # relaxation values are kept in minimization form
        return self.relaxation.value

    def branching_variable(self, integer: np.ndarray, tol: float) -> Optional[int]:
        """Most fractional integer variable, lowest index on ties."""
        x = self.relaxation.x
        best, best_score = None, tol
        for j in np.where(integer)[0]:
            frac = x[j] - math.floor(x[j])
            score = min(frac, 1.0 - frac)
            if score > best_score + 1e-12:
                best, best_score = int(j), score
        return best


def _integer_bounds(model: FlatModel, arrays: LpArrays, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    lower, upper = arrays.lower.copy(), arrays.upper.copy()
    for j, variable in enumerate(model.variables):
        if variable.domain == VarDomain.BINARY:
            lower[j] = max(lower[j], 0.0)
            upper[j] = min(upper[j], 1.0)
        if variable.domain != VarDomain.CONTINUOUS:
            if np.isfinite(lower[j]):
                lower[j] = math.ceil(lower[j] - tol)
            if np.isfinite(upper[j]):
                upper[j] = math.floor(upper[j] + tol)
    return lower, upper


def solve_milp(model: FlatModel, opts: Optional[SolveOptions] = None) -> Solution:
    """
    Solve a flat programme with integer and binary variables.

    Nodes are explored best bound first; ties go to the older node. A
    programme without integer variables is handed to solve_lp.

    Args:
        model (FlatModel): programme to solve
        opts (SolveOptions): tolerances, node and time limits

    Returns:
        Solution: optimal, infeasible, unbounded, nodeLimit (with incumbent_value
        when one was found) or numericalFailure
    """
    opts = opts or SolveOptions()
    if not model.has_integers:
        return solve_lp(model, opts)

    arrays = LpArrays.from_flat(model)
    integer = arrays.integer
    tol = opts.integrality_tolerance
    start = time.monotonic()

    # Step 1: root relaxation
    lower, upper = _integer_bounds(model, arrays, tol)
    root = _relax(arrays, lower, upper, opts)
    iterations = root.iterations
    if root.status != SolveStatus.OPTIMAL:
        logger.info(f"Root relaxation {root.status.value}")
        return Solution(status=root.status, iterations=iterations)

    # Step 2: best-first search
    seq = count()
    heap: List[Tuple[float, int, Node]] = []
    heapq.heappush(heap, (root.value, next(seq), Node(lower, upper, root)))
    incumbent: Optional[np.ndarray] = None
    incumbent_value = math.inf
    nodes = 0

    while heap:
        bound, _, node = heapq.heappop(heap)
        if bound >= incumbent_value - _gap(incumbent_value):
            continue
        if nodes >= opts.node_limit or time.monotonic() - start > opts.time_limit:
            logger.info(f"Search stopped after {nodes} nodes with {len(heap) + 1} open")
            return _limited(model, arrays, incumbent, incumbent_value, nodes, iterations)
        nodes += 1

        j = node.branching_variable(integer, tol)
        if j is None:
            x = node.relaxation.x.copy()
            x[integer] = np.round(x[integer])
            value = float(arrays.cost @ x)
            if value < incumbent_value:
                incumbent, incumbent_value = x, value
                logger.debug(f"New incumbent {arrays.sign * value + arrays.constant} at node {nodes}")
            continue

        value_j = node.relaxation.x[j]
        for side in ("down", "up"):
            child_lower, child_upper = node.lower.copy(), node.upper.copy()
            if side == "down":
                child_upper[j] = math.floor(value_j)
            else:
                child_lower[j] = math.ceil(value_j)
            child = _relax(arrays, child_lower, child_upper, opts)
            iterations += child.iterations
            if child.status == SolveStatus.NUMERICAL_FAILURE:
                return Solution(status=SolveStatus.NUMERICAL_FAILURE, iterations=iterations, nodes=nodes)
            if child.status != SolveStatus.OPTIMAL:
                continue
            if child.value < incumbent_value - _gap(incumbent_value):
                heapq.heappush(heap, (child.value, next(seq),
                                      Node(child_lower, child_upper, child, node.depth + 1)))

    logger.info(f"Branch and bound finished after {nodes} nodes")
    if incumbent is None:
        return Solution(status=SolveStatus.INFEASIBLE, nodes=nodes, iterations=iterations)
    return Solution(
        status=SolveStatus.OPTIMAL,
        objective_value=arrays.sign * incumbent_value + arrays.constant,
        assignment=assignment_of(model, incumbent),
        nodes=nodes,
        iterations=iterations,
    )


def _relax(arrays: LpArrays, lower: np.ndarray, upper: np.ndarray, opts: SolveOptions) -> LpResult:
    """Relaxation with its value in minimization form, without the constant."""
    result = solve_relaxation(arrays, lower, upper, opts)
    if result.status == SolveStatus.OPTIMAL:
        result.value = float(arrays.cost @ result.x)
    return result


def _gap(value: float) -> float:
    if not math.isfinite(value):
        return 0.0
    return 1e-9 * (1.0 + abs(value))


def _limited(model: FlatModel, arrays: LpArrays, incumbent: Optional[np.ndarray],
             incumbent_value: float, nodes: int, iterations: int) -> Solution:
    if incumbent is None:
        return Solution(status=SolveStatus.NODE_LIMIT, nodes=nodes, iterations=iterations)
    return Solution(
        status=SolveStatus.NODE_LIMIT,
        incumbent_value=arrays.sign * incumbent_value + arrays.constant,
        assignment=assignment_of(model, incumbent),
        nodes=nodes,
        iterations=iterations,
    )

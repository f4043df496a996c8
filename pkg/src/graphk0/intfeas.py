"""Integer feasibility by branch and bound on exact LP relaxations.

The search is a depth-first branch and bound with most-fractional branching.
Every verdict is conservative: witnesses are re-verified exactly, Infeasible
is only reported when the whole branch tree has been closed (each leaf with
a rationally infeasible relaxation), and running out of budget yields an
explicit Unknown instead of a guess.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import Matrix, matrix_dims, solve_diophantine
from .lp import EQ, GE, LE, Feasible, constraint, solve_lp


@dataclass(frozen=True)
class IntWitness:
    point: tuple[int, ...]


@dataclass(frozen=True)
class IntInfeasible:
    pass


@dataclass(frozen=True)
class IntUnknown:
    nodes_explored: int


IntResult = IntWitness | IntInfeasible | IntUnknown

Bound = tuple[int | None, int | None]


def integer_feasibility(
    num_vars: int,
    equalities: Sequence[tuple[Sequence[int], int]],
    inequalities: Sequence[tuple[Sequence[int], int]] = (),
    bounds: Sequence[Bound] | None = None,
    budget: int = 100000,
) -> IntResult:
    """Find an integer point satisfying the equalities, <=-inequalities and
    per-variable (lower, upper) bounds; None means unbounded on that side."""
    if budget < 1:
        raise ValueError("budget must be positive")
    if bounds is None:
        bounds = [(0, None)] * num_vars
    bounds = list(bounds)
    if len(bounds) != num_vars:
        raise ValueError("bounds length does not match variable count")

    # lattice preprocessing: if the equalities are unsolvable over Z even
    # without bounds, the whole search space is empty
    if equalities:
        eq_matrix = [list(coeffs) for coeffs, _ in equalities]
        eq_rhs = [rhs for _, rhs in equalities]
        if solve_diophantine(eq_matrix, eq_rhs) is None:
            return IntInfeasible()

    base_cons = [constraint(coeffs, EQ, rhs) for coeffs, rhs in equalities]
    base_cons += [constraint(coeffs, LE, rhs) for coeffs, rhs in inequalities]

    def node_constraints(node_bounds):
        cons = list(base_cons)
        for j, (lo, hi) in enumerate(node_bounds):
            unit = [1 if k == j else 0 for k in range(num_vars)]
            if lo is not None and lo != 0:
                cons.append(constraint(unit, GE, lo))
            if hi is not None:
                cons.append(constraint(unit, LE, hi))
        return cons

    def node_nonneg(node_bounds):
        return [lo is not None and lo >= 0 for lo, _ in node_bounds]

    def verify(point):
        for coeffs, rhs in equalities:
            if sum(c * x for c, x in zip(coeffs, point)) != rhs:
                return False
        for coeffs, rhs in inequalities:
            if sum(c * x for c, x in zip(coeffs, point)) > rhs:
                return False
        for x, (lo, hi) in zip(point, bounds):
            if lo is not None and x < lo:
                return False
            if hi is not None and x > hi:
                return False
        return True

    stack: list[list[Bound]] = [list(bounds)]
    nodes = 0
    while stack:
        if nodes >= budget:
            return IntUnknown(nodes_explored=nodes)
        node = stack.pop()
        nodes += 1
        res = solve_lp(num_vars, node_constraints(node), nonneg=node_nonneg(node))
        if not isinstance(res, Feasible):
            continue
        point = res.point
        frac_var = -1
        frac_score = Fraction(0)
        for j, val in enumerate(point):
            f = val - (val.numerator // val.denominator)
            score = min(f, 1 - f)
            if score > frac_score:
                frac_score = score
                frac_var = j
        if frac_var < 0:
            ints = tuple(int(v) for v in point)
            assert verify(ints)
            return IntWitness(point=ints)
        floor = point[frac_var].numerator // point[frac_var].denominator
        lo, hi = node[frac_var]
        upper = list(node)
        upper[frac_var] = (max(lo, floor + 1) if lo is not None else floor + 1, hi)
        lower = list(node)
        lower[frac_var] = (lo, min(hi, floor) if hi is not None else floor)
        stack.append(upper)
        stack.append(lower)
    return IntInfeasible()


def bounded_nonneg_feasibility(
    a: Matrix,
    b: Sequence[int],
    var_caps: Sequence[int | None],
    budget: int = 100000,
) -> IntResult:
    """Search x >= 0 integer with a @ x == b and x_i <= cap_i (None = no cap)."""
    rows, cols = matrix_dims(a)
    if len(b) != rows:
        raise ValueError("right-hand side length does not match the matrix")
    if len(var_caps) != cols:
        raise ValueError("caps length does not match the matrix")
    if all(x == 0 for x in b):
        return IntWitness(point=(0,) * cols)
    equalities = [(a[i], b[i]) for i in range(rows)]
    bounds = [(0, cap) for cap in var_caps]
    return integer_feasibility(cols, equalities, bounds=bounds, budget=budget)

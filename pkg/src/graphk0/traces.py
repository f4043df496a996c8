"""Graph traces and their identification with states on the K0 group.

A graph trace assigns a nonnegative rational to each vertex so that regular
vertices split their value over their targets (counted with multiplicity)
and infinite emitters dominate every finite batch of theirs.  Norm-one
traces form a rational polytope; its vertices are enumerated exactly.  A
norm-one trace is the same data as a state on the K0 presentation (a
positive normalized functional), and both directions of that dictionary are
implemented with full re-verification.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dd import polytope_vertices
from .graphs import Graph, INF, VertexClass, classify_vertex
from .ktheory import K0Presentation
from .linalg import Element
from .lp import EQ, FarkasCertificate, Feasible, Infeasible, constraint, solve_lp, verify_farkas

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class GraphTrace:
    values: tuple[tuple[str, Fraction], ...]

    @property
    def norm(self) -> Fraction:
        return sum((v for _, v in self.values), _ZERO)

    def value(self, vertex: str) -> Fraction:
        for name, v in self.values:
            if name == vertex:
                return v
        raise ValueError(f"no value for vertex {vertex!r}")

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.values)


@dataclass(frozen=True)
class NoTrace:
    certificate: FarkasCertificate


@dataclass(frozen=True)
class TracePolytope:
    """Exact description of the norm-one graph traces.

    Variables are the vertices (implicitly nonnegative); ``forced_zero``
    lists the vertices pinned to zero because they receive infinitely many
    edges from one emitter.
    """

    variables: tuple[str, ...]
    equalities: tuple[tuple[tuple[int, ...], int], ...]
    inequalities: tuple[tuple[tuple[int, ...], int], ...]
    forced_zero: frozenset[str]


def trace_constraints(g: Graph) -> TracePolytope:
    names = g.vertices
    idx = {v: i for i, v in enumerate(names)}
    n = len(names)
    equalities: list[tuple[tuple[int, ...], int]] = []
    inequalities: list[tuple[tuple[int, ...], int]] = []
    forced: set[str] = set()

    for v in names:
        cls = classify_vertex(g, v)
        if cls is VertexClass.REGULAR:
            row = [0] * n
            row[idx[v]] += 1
            for w, m in g.out_edges(v):
                row[idx[w]] -= m
            equalities.append((tuple(row), 0))
        elif cls is VertexClass.INFINITE_EMITTER:
            row = [0] * n
            row[idx[v]] -= 1
            for w, m in g.out_edges(v):
                if m is INF:
                    forced.add(w)
                else:
                    row[idx[w]] += m
            inequalities.append((tuple(row), 0))

    for w in sorted(forced, key=idx.get):
        row = [0] * n
        row[idx[w]] = 1
        equalities.append((tuple(row), 0))
    equalities.append((tuple([1] * n), 1))  # norm one

    return TracePolytope(
        variables=names,
        equalities=tuple(equalities),
        inequalities=tuple(inequalities),
        forced_zero=frozenset(forced),
    )


def verify_graph_trace(g: Graph, t: GraphTrace) -> bool:
    """Exact check of the defining conditions plus nonnegativity."""
    values = t.as_dict()
    if set(values) != set(g.vertices):
        return False
    if any(val < 0 for val in values.values()):
        return False
    for v in g.vertices:
        cls = classify_vertex(g, v)
        if cls is VertexClass.REGULAR:
            if values[v] != sum((m * values[w] for w, m in g.out_edges(v)), _ZERO):
                return False
        elif cls is VertexClass.INFINITE_EMITTER:
            finite_sum = _ZERO
            for w, m in g.out_edges(v):
                if m is INF:
                    if values[w] != 0:
                        return False
                else:
                    finite_sum += m * values[w]
            if values[v] < finite_sum:
                return False
    return True


def _polytope_lp(poly: TracePolytope):
    n = len(poly.variables)
    cons = [constraint(row, EQ, rhs) for row, rhs in poly.equalities]
    cons += [constraint(row, "<=", rhs) for row, rhs in poly.inequalities]
    return n, cons


def find_graph_trace(g: Graph) -> GraphTrace | NoTrace:
    """Any norm-one graph trace, or a NoTrace with a Farkas certificate."""
    poly = trace_constraints(g)
    n, cons = _polytope_lp(poly)
    res = solve_lp(n, cons)
    if isinstance(res, Infeasible):
        assert verify_farkas(n, cons, [True] * n, res.certificate)
        return NoTrace(certificate=res.certificate)
    assert isinstance(res, Feasible)
    trace = GraphTrace(values=tuple(zip(poly.variables, res.point)))
    assert verify_graph_trace(g, trace) and trace.norm == 1
    return trace


def extreme_traces(g: Graph) -> list[GraphTrace]:
    """All extreme points of the norm-one trace polytope, sorted canonically."""
    poly = trace_constraints(g)
    vertices = polytope_vertices(
        len(poly.variables), list(poly.equalities), list(poly.inequalities)
    )
    traces = []
    for point in vertices:
        trace = GraphTrace(values=tuple(zip(poly.variables, point)))
        assert verify_graph_trace(g, trace) and trace.norm == 1
        traces.append(trace)
    return traces


@dataclass(frozen=True)
class StateOnK0:
    """A positive normalized functional on a K0 presentation, recorded by its
    values on the vertex classes."""

    values_on_delta: tuple[tuple[str, Fraction], ...]
    presentation: K0Presentation

    def evaluate(self, e: Element) -> Fraction:
        k = self.presentation
        values = dict(self.values_on_delta)
        phi = [values[v] for v in k.ambient_order]
        lift = k.coker.lift(e)
        return sum((p * c for p, c in zip(phi, lift)), _ZERO)


def verify_state(s: StateOnK0) -> bool:
    """Well defined on the quotient, nonnegative on the cone, one on the unit."""
    k = s.presentation
    values = dict(s.values_on_delta)
    if set(values) != set(k.graph.vertices):
        return False
    phi = [values[v] for v in k.ambient_order]
    mat = k.relation_matrix
    for col in range(len(mat[0]) if mat else 0):
        if sum((phi[i] * mat[i][col] for i in range(len(mat))), _ZERO) != 0:
            return False
    if any(p < 0 for p in phi):
        return False
    for fam in k.cone.families:
        value = values[fam.emitter]
        for w, cap in fam.targets:
            if cap is None:
                if values[w] != 0:
                    return False
            else:
                value -= cap * values[w]
        if value < 0:
            return False
    unit_value = s.evaluate(k.order_unit)
    return unit_value == 1


def trace_to_state(g: Graph, k: K0Presentation, t: GraphTrace) -> StateOnK0:
    """Send a norm-one trace to the state with f([v]) = t(v)."""
    if not verify_graph_trace(g, t):
        raise ValueError("not a graph trace")
    if t.norm != 1:
        raise ValueError(f"trace has norm {t.norm}, expected 1")
    state = StateOnK0(values_on_delta=t.values, presentation=k)
    assert verify_state(state)
    return state


def state_to_trace(g: Graph, k: K0Presentation, s: StateOnK0) -> GraphTrace:
    """Read a state back as the trace v -> f([v])."""
    if not verify_state(s):
        raise ValueError("not a state on this presentation")
    trace = GraphTrace(
        values=tuple((v, dict(s.values_on_delta)[v]) for v in g.vertices)
    )
    assert verify_graph_trace(g, trace) and trace.norm == 1
    return trace


@dataclass(frozen=True)
class TraceReport:
    condition_k: bool
    trace_state_identification: str  # "canonical" | "states-only"
    trace_count: object  # None (no traces) | 1 | INF


def tracial_state_report(g: Graph) -> TraceReport:
    """Condition (K) status plus the size of the norm-one trace set.

    Under Condition (K) the tracial states of the algebra are canonically the
    norm-one graph traces; otherwise the computed set still matches the
    states on K0, and the report says so.
    """
    from .graphs import satisfies_condition_k

    condition_k = satisfies_condition_k(g)
    extremes = extreme_traces(g)
    if not extremes:
        count: object = None
    elif len(extremes) == 1:
        count = 1
    else:
        count = INF
    return TraceReport(
        condition_k=condition_k,
        trace_state_identification="canonical" if condition_k else "states-only",
        trace_count=count,
    )

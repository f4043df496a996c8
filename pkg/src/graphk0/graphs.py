"""Directed multigraphs with finitely many vertices and edge multiplicities
in N ∪ {∞}.

Vertices are named tokens whose declaration order is remembered and canonical.
Parallel edges are stored as multiplicities; an infinite multiplicity marks an
infinite emitter.  Graphs are immutable after construction and every operation
here is a pure function, so concurrent read-only use is safe.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

_ID_RE = re.compile(r"[A-Za-z0-9_]+\Z")


class Infinity:
    """Marker for an infinite edge multiplicity; compare with ``is INF``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"


INF = Infinity()

Mult = "int | Infinity"


class Graph:
    """Finite vertex list plus a (source, target) -> multiplicity table."""

    __slots__ = ("_vertices", "_index", "_mult", "_out")

    def __init__(self, vertices: Iterable[str], multiplicities: Mapping[tuple[str, str], object]):
        vs = tuple(vertices)
        index = {}
        for v in vs:
            if not isinstance(v, str) or not _ID_RE.match(v):
                raise ValueError(f"invalid vertex name {v!r}")
            if v in index:
                raise ValueError(f"duplicate vertex {v!r}")
            index[v] = len(index)
        mult = {}
        for (src, dst), m in multiplicities.items():
            if src not in index or dst not in index:
                raise ValueError(f"edge endpoint not declared: {src!r} -> {dst!r}")
            if m is INF:
                mult[(src, dst)] = INF
            elif isinstance(m, int) and not isinstance(m, bool) and m >= 1:
                mult[(src, dst)] = m
            elif m == 0:
                continue
            else:
                raise ValueError(f"invalid multiplicity {m!r} for {src!r} -> {dst!r}")
        self._vertices = vs
        self._index = index
        self._mult = mult
        out: dict[str, list[tuple[str, object]]] = {v: [] for v in vs}
        for dst in vs:
            for src in vs:
                m = mult.get((src, dst))
                if m is not None:
                    out[src].append((dst, m))
        # targets in declaration order
        for v in vs:
            out[v].sort(key=lambda pair: index[pair[0]])
        self._out = out

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise ValueError(f"unknown vertex {v!r}") from None

    def multiplicity(self, src: str, dst: str):
        self.index(src)
        self.index(dst)
        return self._mult.get((src, dst), 0)

    def out_edges(self, v: str) -> list[tuple[str, object]]:
        self.index(v)
        return list(self._out[v])

    def edges(self) -> list[tuple[str, str, object]]:
        """All edges as (source, target, multiplicity) in canonical order."""
        result = []
        for src in self._vertices:
            for dst, m in self._out[src]:
                result.append((src, dst, m))
        return result

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._vertices == other._vertices and self._mult == other._mult

    def __hash__(self):
        return hash((self._vertices, tuple(sorted(self._mult.items()))))

    def __repr__(self):
        return f"Graph(vertices={len(self._vertices)}, edges={len(self._mult)})"


class VertexClass(Enum):
    REGULAR = "regular"
    SINK = "sink"
    INFINITE_EMITTER = "infinite-emitter"


def classify_vertex(g: Graph, v: str) -> VertexClass:
    """Sink (no outgoing edges), infinite emitter, or regular."""
    out = g.out_edges(v)
    if not out:
        return VertexClass.SINK
    if any(m is INF for _, m in out):
        return VertexClass.INFINITE_EMITTER
    return VertexClass.REGULAR


def is_singular(g: Graph, v: str) -> bool:
    return classify_vertex(g, v) is not VertexClass.REGULAR


@dataclass(frozen=True)
class BlockDecomposition:
    """Split of the vertex matrix rows by regular/singular source vertices.

    ``regular_block[i][j]`` counts edges from the i-th regular vertex to the
    j-th regular vertex, ``singular_block[i][j]`` to the j-th singular one.
    Regular rows are finite by definition, so all entries are ints.
    """

    regular: tuple[str, ...]
    singular: tuple[str, ...]
    regular_block: list[list[int]]
    singular_block: list[list[int]]


def block_decomposition(g: Graph) -> BlockDecomposition:
    regular = tuple(v for v in g.vertices if classify_vertex(g, v) is VertexClass.REGULAR)
    singular = tuple(v for v in g.vertices if is_singular(g, v))
    reg_block = [[g.multiplicity(v, w) for w in regular] for v in regular]
    sing_block = [[g.multiplicity(v, w) for w in singular] for v in regular]
    return BlockDecomposition(
        regular=regular,
        singular=singular,
        regular_block=reg_block,
        singular_block=sing_block,
    )


@dataclass(frozen=True)
class GraphPredicates:
    row_finite: bool
    has_loop: bool
    is_af: bool
    unital: bool
    singular_vertices: tuple[str, ...]


def has_directed_cycle(g: Graph) -> bool:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in g.vertices}
    for start in g.vertices:
        if color[start] != WHITE:
            continue
        stack = [(start, iter([w for w, _ in g.out_edges(start)]))]
        color[start] = GRAY
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if color[w] == GRAY:
                    return True
                if color[w] == WHITE:
                    color[w] = GRAY
                    stack.append((w, iter([u for u, _ in g.out_edges(w)])))
                    advanced = True
                    break
            if not advanced:
                color[v] = BLACK
                stack.pop()
    return False


def predicates(g: Graph) -> GraphPredicates:
    row_finite = all(classify_vertex(g, v) is not VertexClass.INFINITE_EMITTER for v in g.vertices)
    loop = has_directed_cycle(g)
    return GraphPredicates(
        row_finite=row_finite,
        has_loop=loop,
        is_af=not loop,
        unital=True,
        singular_vertices=tuple(v for v in g.vertices if is_singular(g, v)),
    )


def simple_loop_census(g: Graph) -> dict[str, int]:
    """For each vertex, the number of simple directed cycles through it,
    counted with edge multiplicity and saturated at 2 ("two or more")."""
    return {v: _cycles_through(g, v) for v in g.vertices}


def _cycles_through(g: Graph, base: str) -> int:
    total = 0

    def weight(m) -> int:
        if m is INF or m >= 2:
            return 2
        return 1

    # DFS over vertex-distinct paths that return to the base vertex
    def dfs(current: str, visited: frozenset[str], acc: int) -> bool:
        nonlocal total
        for target, m in g.out_edges(current):
            w = min(2, acc * weight(m))
            if target == base:
                total = min(2, total + w)
                if total >= 2:
                    return True
            elif target not in visited:
                if dfs(target, visited | {target}, w):
                    return True
        return False

    dfs(base, frozenset({base}), 1)
    return total


def satisfies_condition_k(g: Graph) -> bool:
    """True iff no vertex lies on exactly one simple loop."""
    return all(count != 1 for count in simple_loop_census(g).values())


def emitter_edge_listing(g: Graph, v: str, count: int) -> list[str]:
    """First ``count`` targets of the canonical outgoing-edge listing of an
    infinite emitter: finite-multiplicity edges first (targets in declaration
    order, each repeated per multiplicity), then an endless round-robin over
    the infinite-multiplicity targets in declaration order."""
    finite_part: list[str] = []
    infinite_targets: list[str] = []
    for w, m in g.out_edges(v):
        if m is INF:
            infinite_targets.append(w)
        else:
            finite_part.extend([w] * m)
    listing = finite_part[:count]
    i = 0
    while len(listing) < count:
        if not infinite_targets:
            raise ValueError(f"vertex {v!r} has fewer than {count} outgoing edges")
        listing.append(infinite_targets[i % len(infinite_targets)])
        i += 1
    return listing


def desingularize(
    g: Graph, depth: int, sinks: bool = True, infinite_emitters: bool = True
) -> Graph:
    """Append a finite tail to each selected singular vertex.

    Each selected vertex v0 grows a chain v0 -> t1 -> ... -> t_depth of fresh
    vertices (the last a sink).  For an infinite emitter the outgoing edges
    are listed canonically and the j-th edge is re-sourced to the (j-1)-th
    tail vertex (t0 = v0); edges beyond index ``depth`` are dropped.  With
    ``infinite_emitters`` selected the result is row-finite.
    """
    graph, _tails = desingularize_with_tails(g, depth, sinks, infinite_emitters)
    return graph


def desingularize_with_tails(
    g: Graph, depth: int, sinks: bool = True, infinite_emitters: bool = True
) -> tuple[Graph, dict[str, tuple[str, int]]]:
    """Like :func:`desingularize`, also mapping tail vertex -> (base, position)."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    selected = []
    for v in g.vertices:
        cls = classify_vertex(g, v)
        if cls is VertexClass.SINK and sinks:
            selected.append(v)
        elif cls is VertexClass.INFINITE_EMITTER and infinite_emitters:
            selected.append(v)

    rewired = {
        v for v in selected if classify_vertex(g, v) is VertexClass.INFINITE_EMITTER
    }
    vertices = list(g.vertices)
    existing = set(vertices)
    mult: dict[tuple[str, str], object] = {}
    for src, dst, m in g.edges():
        if src not in rewired:
            mult[(src, dst)] = m

    tails: dict[str, tuple[str, int]] = {}

    def add_edge(src: str, dst: str) -> None:
        cur = mult.get((src, dst), 0)
        mult[(src, dst)] = INF if cur is INF else cur + 1

    for v in selected:
        chain = []
        for j in range(1, depth + 1):
            name = f"{v}__t{j}"
            while name in existing:
                name += "_"
            existing.add(name)
            vertices.append(name)
            chain.append(name)
            tails[name] = (v, j)
        prev = v
        for t in chain:
            add_edge(prev, t)
            prev = t
        if v in rewired:
            listing = emitter_edge_listing(g, v, depth)
            sources = [v] + chain[:-1]
            for source, target in zip(sources, listing):
                add_edge(source, target)

    return Graph(vertices, mult), tails

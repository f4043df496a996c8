import random
from itertools import permutations

import pytest

from graphk0.graphs import (
    INF,
    Graph,
    VertexClass,
    block_decomposition,
    classify_vertex,
    desingularize,
    desingularize_with_tails,
    emitter_edge_listing,
    predicates,
    satisfies_condition_k,
    simple_loop_census,
)


def two_loop():
    return Graph(["v"], {("v", "v"): 2})


def infinite_loop():
    return Graph(["v"], {("v", "v"): INF})


def toeplitz():
    return Graph(["v", "w"], {("v", "v"): 1, ("v", "w"): 1})


def brute_census(g, base):
    """Independent oracle: enumerate vertex subsets and cyclic orders."""
    names = list(g.vertices)
    count = 0
    for size in range(1, len(names) + 1):
        for cycle in permutations(names, size):
            if base not in cycle:
                continue
            # count each cycle once: fix the rotation starting at base
            if cycle[0] != base:
                continue
            weight = 1
            ok = True
            for i, src in enumerate(cycle):
                dst = cycle[(i + 1) % size]
                m = g.multiplicity(src, dst)
                if m == 0:
                    ok = False
                    break
                weight *= 2 if (m is INF or m >= 2) else 1
            if ok:
                count += weight
            if count >= 2:
                return 2
    return min(count, 2)


def random_graph(rng, max_vertices=6, max_mult=3, inf_prob=0.0, edge_prob=0.35):
    n = rng.randint(1, max_vertices)
    names = [f"v{i}" for i in range(n)]
    mult = {}
    for src in names:
        for dst in names:
            if rng.random() < edge_prob:
                if inf_prob and rng.random() < inf_prob:
                    mult[(src, dst)] = INF
                else:
                    mult[(src, dst)] = rng.randint(1, max_mult)
    return Graph(names, mult)


class TestGraphModel:
    def test_validation(self):
        with pytest.raises(ValueError):
            Graph(["a", "a"], {})
        with pytest.raises(ValueError):
            Graph(["a"], {("a", "b"): 1})
        with pytest.raises(ValueError):
            Graph(["a"], {("a", "a"): -1})
        with pytest.raises(ValueError):
            Graph(["bad name"], {})

    def test_zero_multiplicity_dropped(self):
        g = Graph(["a", "b"], {("a", "b"): 0})
        assert g.edges() == []

    def test_classify(self):
        g = Graph(["v"], {})
        assert classify_vertex(g, "v") is VertexClass.SINK
        assert classify_vertex(infinite_loop(), "v") is VertexClass.INFINITE_EMITTER
        g = Graph(["v", "w"], {("v", "w"): 3})
        assert classify_vertex(g, "v") is VertexClass.REGULAR
        assert classify_vertex(g, "w") is VertexClass.SINK
        with pytest.raises(ValueError):
            classify_vertex(g, "nope")

    def test_classes_partition(self):
        rng = random.Random(11)
        for _ in range(40):
            g = random_graph(rng, inf_prob=0.2)
            for v in g.vertices:
                cls = classify_vertex(g, v)
                out = g.out_edges(v)
                if cls is VertexClass.SINK:
                    assert not out
                elif cls is VertexClass.INFINITE_EMITTER:
                    assert any(m is INF for _, m in out)
                else:
                    assert out and all(m is not INF for _, m in out)


class TestBlockDecomposition:
    def test_toeplitz(self):
        bd = block_decomposition(toeplitz())
        assert bd.regular == ("v",)
        assert bd.singular == ("w",)
        assert bd.regular_block == [[1]]
        assert bd.singular_block == [[1]]

    def test_two_loop(self):
        bd = block_decomposition(two_loop())
        assert bd.regular == ("v",)
        assert bd.singular == ()
        assert bd.regular_block == [[2]]
        assert bd.singular_block == [[]]

    def test_infinite_loop(self):
        bd = block_decomposition(infinite_loop())
        assert bd.regular == ()
        assert bd.singular == ("v",)
        assert bd.regular_block == []
        assert bd.singular_block == []

    def test_row_sums(self):
        rng = random.Random(23)
        for _ in range(40):
            g = random_graph(rng)
            bd = block_decomposition(g)
            for i, v in enumerate(bd.regular):
                out = sum(m for _, m in g.out_edges(v))
                assert sum(bd.regular_block[i]) + sum(bd.singular_block[i]) == out


class TestPredicates:
    def test_two_loop(self):
        p = predicates(two_loop())
        assert (p.row_finite, p.has_loop, p.is_af, p.unital) == (True, True, False, True)

    def test_path(self):
        p = predicates(Graph(["v", "w"], {("v", "w"): 1}))
        assert (p.row_finite, p.has_loop, p.is_af, p.unital) == (True, False, True, True)

    def test_infinite_loop(self):
        p = predicates(infinite_loop())
        assert (p.row_finite, p.has_loop, p.is_af, p.unital) == (False, True, False, True)
        assert p.singular_vertices == ("v",)


class TestSimpleLoopCensus:
    def test_two_loop(self):
        assert simple_loop_census(two_loop()) == {"v": 2}

    def test_toeplitz(self):
        assert simple_loop_census(toeplitz()) == {"v": 1, "w": 0}

    def test_two_cycle_plus_loop(self):
        g = Graph(["v", "w"], {("v", "w"): 1, ("w", "v"): 1, ("v", "v"): 1})
        assert simple_loop_census(g) == {"v": 2, "w": 1}

    def test_condition_k(self):
        assert not satisfies_condition_k(toeplitz())
        assert satisfies_condition_k(two_loop())
        assert satisfies_condition_k(Graph(["v", "w"], {("v", "w"): 1}))

    def test_against_brute_force(self):
        rng = random.Random(555)
        for _ in range(60):
            g = random_graph(rng, max_vertices=6, inf_prob=0.15)
            census = simple_loop_census(g)
            for v in g.vertices:
                assert census[v] == brute_census(g, v), (g.edges(), v)
            assert satisfies_condition_k(g) == all(c != 1 for c in census.values())

    def test_acyclic_vertices_have_zero(self):
        rng = random.Random(808)
        for _ in range(30):
            g = random_graph(rng, max_vertices=5)
            census = simple_loop_census(g)
            if not predicates(g).has_loop:
                assert all(c == 0 for c in census.values())


class TestDesingularize:
    def test_infinite_loop_depth3(self):
        out = desingularize(infinite_loop(), 3)
        assert out.vertices == ("v", "v__t1", "v__t2", "v__t3")
        edges = set((s, d) for s, d, _ in out.edges())
        assert edges == {
            ("v", "v__t1"),
            ("v", "v"),
            ("v__t1", "v__t2"),
            ("v__t1", "v"),
            ("v__t2", "v__t3"),
            ("v__t2", "v"),
        }
        assert classify_vertex(out, "v__t3") is VertexClass.SINK

    def test_sink_tail(self):
        g = Graph(["w"], {})
        out = desingularize(g, 2, sinks=True, infinite_emitters=False)
        assert out.vertices == ("w", "w__t1", "w__t2")
        assert [(s, d) for s, d, _ in out.edges()] == [
            ("w", "w__t1"),
            ("w__t1", "w__t2"),
        ]

    def test_mixed_finite_and_infinite(self):
        g = Graph(
            ["v", "a", "b"],
            {("v", "a"): 1, ("v", "b"): INF},
        )
        out = desingularize(g, 2, sinks=False, infinite_emitters=True)
        edges = set((s, d) for s, d, _ in out.edges())
        assert ("v", "v__t1") in edges
        assert ("v", "a") in edges
        assert ("v__t1", "v__t2") in edges
        assert ("v__t1", "b") in edges
        assert predicates(out).row_finite

    def test_depth_zero_rejected(self):
        with pytest.raises(ValueError):
            desingularize(infinite_loop(), 0)

    def test_row_finite_after(self):
        rng = random.Random(91)
        for _ in range(40):
            g = random_graph(rng, max_vertices=4, inf_prob=0.4)
            out = desingularize(g, rng.randint(1, 3), sinks=rng.random() < 0.5)
            assert predicates(out).row_finite

    def test_deterministic(self):
        from graphk0.textio import serialize_graph

        g = Graph(["v", "a"], {("v", "v"): INF, ("v", "a"): 2})
        one = desingularize(g, 3)
        two = desingularize(g, 3)
        assert one == two
        assert serialize_graph(one) == serialize_graph(two)

    def test_name_collision(self):
        g = Graph(["v", "v__t1"], {("v", "v"): INF})
        out, tails = desingularize_with_tails(g, 1)
        assert len(set(out.vertices)) == len(out.vertices)
        assert all(t not in g.vertices for t in tails)

    def test_no_singular_identity(self):
        g = two_loop()
        assert desingularize(g, 5) == g


class TestEdgeListing:
    def test_finite_first_then_round_robin(self):
        g = Graph(
            ["v", "a", "b", "c"],
            {("v", "a"): 2, ("v", "b"): INF, ("v", "c"): INF},
        )
        assert emitter_edge_listing(g, "v", 6) == ["a", "a", "b", "c", "b", "c"]

    def test_too_short(self):
        g = Graph(["v", "a"], {("v", "a"): 2})
        with pytest.raises(ValueError):
            emitter_edge_listing(g, "v", 3)

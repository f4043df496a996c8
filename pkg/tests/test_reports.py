import json

import pytest

from graphk0.graphs import INF, Graph
from graphk0.ktheory import (
    UnknownMembership,
    compare_k0,
    compute_k0,
    cone_membership,
    verify_desingularization_consistency,
)
from graphk0.linalg import Element
from graphk0.reports import JSON, element_from_json, emit_report
from graphk0.textio import parse_graph
from graphk0.traces import find_graph_trace


def toeplitz():
    return Graph(["v", "w"], {("v", "v"): 1, ("v", "w"): 1})


class TestEmitReport:
    def test_unknown_membership_schema(self):
        payload = json.loads(emit_report(UnknownMembership(budget_spent=1000000), JSON))
        assert payload["verdict"] == "unknown"
        assert payload["budget"] == 1000000

    def test_k0_o3(self):
        k = compute_k0(Graph(["v"], {("v", "v"): 3}))
        payload = json.loads(emit_report(k, JSON))
        assert payload["free_rank"] == 0
        assert payload["torsion"] == [2]

    def test_empty_trace_set(self):
        result = find_graph_trace(Graph(["v"], {("v", "v"): 2}))
        payload = json.loads(emit_report(result, JSON))
        assert payload["traces"] == []

    def test_graph_human_is_canonical_text(self):
        g = Graph(["v"], {("v", "v"): INF})
        text = emit_report(g)
        assert parse_graph(text).graph == g

    def test_membership_round_trip(self):
        k = compute_k0(toeplitz())
        verdict = cone_membership(k, Element(torsion=(), free=(-1,)))
        payload = json.loads(emit_report(verdict, JSON))
        assert payload["verdict"] == "not_member"
        assert payload["functional"] == ["1/1", "0/1"]

    def test_comparison(self):
        o2 = compute_k0(Graph(["v"], {("v", "v"): 2}))
        o3 = compute_k0(Graph(["v"], {("v", "v"): 3}))
        payload = json.loads(emit_report(compare_k0(o2, o3), JSON))
        assert payload["verdict"] == "not_isomorphic"

    def test_consistency(self):
        report = verify_desingularization_consistency(Graph(["v"], {("v", "v"): INF}), 2)
        text = emit_report(report)
        assert "groups match: True" in text

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit_report(UnknownMembership(budget_spent=1), "yaml")

    def test_unknown_type(self):
        with pytest.raises(TypeError):
            emit_report(object())


class TestElementFromJson:
    def test_defaults(self):
        e = element_from_json({}, 1, 2)
        assert e == Element(torsion=(0,), free=(0, 0))

    def test_strings_accepted(self):
        e = element_from_json({"free": ["9007199254740993"]}, 0, 1)
        assert e.free == (9007199254740993,)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            element_from_json({"free": [1, 2]}, 0, 1)

import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from ellss.graph import (CLASSIC_LABEL, GraphError, dump_graph,
                         generate_random_graph, load_graph, make_graph)

from conftest import graphs

P3_DOC = {"mode": "classic", "nodes": [{"id": 1}, {"id": 2}, {"id": 3}],
          "edges": [[1, 2], [2, 3]]}


def test_classic_shorthand_expands_to_single_label():
    g = load_graph(json.dumps(P3_DOC))
    assert g.labels == (CLASSIC_LABEL,)
    for i in range(3):
        assert g.demand_labels(i) == (0,)
        assert g.service_labels(i) == (0,)


def test_p3_counts():
    g = load_graph(P3_DOC)
    assert g.max_degree == 2
    assert g.max_d == 1
    assert g.degree(g.index_of[2]) == 2
    assert g.closed_nbhd(g.index_of[2]) == (1, 0, 2)


@pytest.mark.parametrize("doc, fragment", [
    ({**P3_DOC, "edges": [[1, 1]]}, "self-loop"),
    ({**P3_DOC, "nodes": [{"id": 1}, {"id": 1}, {"id": 3}]}, "duplicate id 1"),
    ({**P3_DOC, "edges": [[1, 9]]}, "unknown node 9"),
    ({"mode": "sdds", "nodes": [{"id": 1, "demands": ["a"]}], "edges": []},
     "node 1 is missing 'services'"),
    ({"mode": "weird", "nodes": [{"id": 1}]}, "unknown mode"),
    ({"mode": "classic", "nodes": []}, "nonempty"),
])
def test_rejects_bad_documents(doc, fragment):
    with pytest.raises(GraphError, match=fragment):
        load_graph(doc)


def test_malformed_json():
    with pytest.raises(GraphError, match="malformed"):
        load_graph("{not json")


def test_asymmetric_adjacency_rejected():
    from ellss.graph import Graph
    with pytest.raises(GraphError, match="asymmetric"):
        Graph((1, 2), ((1,), ()), ("dom",), (1, 1), (1, 1))


def test_empty_demands_allowed():
    g = make_graph([1, 2], [(1, 2)], [[], ["x"]], [["x"], []])
    assert g.demand_labels(0) == ()


def test_single_node_generator():
    g = generate_random_graph(1, 0.0, 1, 7)
    assert g.n == 1 and g.adj == ((),)
    assert g.demands == (1,) and g.services == (1,)


def test_generator_is_deterministic():
    assert generate_random_graph(9, 0.4, 3, 5) == generate_random_graph(9, 0.4, 3, 5)


def _reference_edge_count(n, p, seed):
    # Documented sampling order: one draw per pair (i, j), i < j, lexicographic.
    rng = random.Random(seed)
    return sum(rng.random() < p for i in range(n) for j in range(i + 1, n))


def test_generator_matches_reference_sampling():
    g = generate_random_graph(10, 0.3, 3, 42)
    assert len(g.edges) == _reference_edge_count(10, 0.3, 42)
    rng = random.Random(42)
    for i in range(10):
        for j in range(i + 1, 10):
            rng.random()
    masks = [(rng.randrange(1, 8), rng.randrange(1, 8)) for _ in range(10)]
    assert list(zip(g.demands, g.services)) == masks


@pytest.mark.parametrize("args", [(0, 0.5, 1, 0), (3, 1.5, 1, 0), (3, 0.5, 0, 0),
                                  (3, 0.5, 1, -1)])
def test_generator_validates(args):
    with pytest.raises(GraphError):
        generate_random_graph(*args)


@given(graphs())
def test_round_trip(g):
    again = load_graph(json.dumps(dump_graph(g)))
    assert again == g


@settings(max_examples=60)
@given(st.integers(1, 14), st.floats(0, 1), st.integers(1, 4), st.integers(0, 2**32))
def test_generated_graphs_are_simple(n, p, universe, seed):
    g = generate_random_graph(n, p, universe, seed)
    assert len(set(g.ids)) == n
    for i, nbrs in enumerate(g.adj):
        assert i not in nbrs
        assert all(i in g.adj[j] for j in nbrs)
    assert all(m != 0 for m in g.demands + g.services)

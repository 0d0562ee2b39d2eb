import pytest
from hypothesis import strategies as st

from ellss.graph import Graph, complete_graph, make_graph, path_graph


@pytest.fixture
def p3():
    return path_graph(3)


@pytest.fixture
def k2():
    return complete_graph(2)


@pytest.fixture
def triangle():
    return complete_graph(3)


@st.composite
def graphs(draw, min_n=1, max_n=7, max_universe=3, classic=None):
    """Arbitrary simple graphs with shuffled distinct ids and random labels."""
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    ids = draw(st.lists(st.integers(1, 60), min_size=n, max_size=n, unique=True))
    if classic is None:
        classic = draw(st.booleans())
    edges = [(ids[i], ids[j]) for i, j in chosen]
    if classic:
        return make_graph(ids, edges)
    universe = draw(st.integers(1, max_universe))
    labels = [f"d{b}" for b in range(universe)]
    subsets = st.lists(st.sampled_from(labels), unique=True, max_size=universe)
    demands = [draw(subsets) for _ in range(n)]
    services = [draw(subsets) for _ in range(n)]
    return make_graph(ids, edges, demands, services, labels)


def binary_states(graph: Graph):
    from ellss.rules import IN, OUT
    return st.tuples(*[st.sampled_from((IN, OUT)) for _ in range(graph.n)])


def colorings(graph: Graph, top=None):
    return st.tuples(*[st.integers(1, top or graph.degree(i) + 2) for i in range(graph.n)])

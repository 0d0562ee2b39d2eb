"""Input graphs with per-node demand/service annotations.

Nodes are indexed ``0..n-1``; the external ``id`` of each node is kept only
for tie-breaking and for the interchange format. Demand and service labels
are interned to dense integers and stored as bitmasks, so ``d in S_j`` is a
single shift-and-mask.
"""

from __future__ import annotations

import enum
import json
import random
from collections import deque
from dataclasses import dataclass
from functools import cached_property

CLASSIC_LABEL = "dom"


class GraphError(ValueError):
    """Raised for malformed graph documents or invalid generator arguments."""


class ProblemKind(enum.Enum):
    SDDS = "sdds"
    VC = "vc"
    IS = "is"
    GC = "gc"

    @property
    def binary(self) -> bool:
        return self is not ProblemKind.GC


@dataclass(frozen=True)
class Graph:
    ids: tuple[int, ...]
    adj: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = (CLASSIC_LABEL,)
    demands: tuple[int, ...] = ()
    services: tuple[int, ...] = ()
    mode: str = "classic"

    def __post_init__(self):
        n = len(self.ids)
        if n < 1:
            raise GraphError("graph needs at least one node")
        if len(set(self.ids)) != n:
            raise GraphError("node ids must be distinct")
        if any(not isinstance(x, int) or x < 1 for x in self.ids):
            raise GraphError("node ids must be positive integers")
        if len(self.adj) != n:
            raise GraphError("adjacency length does not match node count")
        for i, nbrs in enumerate(self.adj):
            if i in nbrs:
                raise GraphError(f"self-loop at node {self.ids[i]}")
            for j in nbrs:
                if i not in self.adj[j]:
                    raise GraphError(f"asymmetric edge {self.ids[i]}-{self.ids[j]}")
        if len(self.demands) != n or len(self.services) != n:
            raise GraphError("demand/service arrays must cover every node")
        full = (1 << len(self.labels)) - 1
        for mask in self.demands + self.services:
            if mask & ~full:
                raise GraphError("label mask outside the label universe")

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def max_degree(self) -> int:
        return max(len(a) for a in self.adj)

    @property
    def max_d(self) -> int:
        return len(self.labels)

    def degree(self, i: int) -> int:
        return len(self.adj[i])

    def closed_nbhd(self, i: int) -> tuple[int, ...]:
        return (i, *self.adj[i])

    def serves(self, k: int, d: int) -> bool:
        return bool(self.services[k] >> d & 1)

    def demand_labels(self, i: int) -> tuple[int, ...]:
        return self._label_lists[0][i]

    def service_labels(self, i: int) -> tuple[int, ...]:
        return self._label_lists[1][i]

    @cached_property
    def _label_lists(self):
        def unpack(mask):
            return tuple(b for b in range(len(self.labels)) if mask >> b & 1)

        return (
            tuple(unpack(m) for m in self.demands),
            tuple(unpack(m) for m in self.services),
        )

    @cached_property
    def index_of(self) -> dict[int, int]:
        return {node_id: i for i, node_id in enumerate(self.ids)}

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, j) for i in range(self.n) for j in self.adj[i] if i < j)

    def ball(self, i: int, radius: int) -> frozenset[int]:
        """Nodes within ``radius`` hops of ``i`` (inclusive)."""
        key = (i, radius)
        cache = self._balls
        if key not in cache:
            dist = self.distances_from(i)
            cache[key] = frozenset(v for v, d in dist.items() if d <= radius)
        return cache[key]

    @cached_property
    def _balls(self) -> dict:
        return {}

    def distances_from(self, i: int) -> dict[int, int]:
        dist = {i: 0}
        queue = deque([i])
        while queue:
            u = queue.popleft()
            for v in self.adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist


def make_graph(ids, edges, demands=None, services=None, labels=None) -> Graph:
    """Build a graph from external ids and an id-based edge list.

    ``demands``/``services`` are per-node iterables of label strings; when both
    are omitted every node demands and serves the single classic label.
    """
    ids = tuple(ids)
    index = {}
    for pos, node_id in enumerate(ids):
        if node_id in index:
            raise GraphError(f"duplicate id {node_id}")
        index[node_id] = pos
    adj = [set() for _ in ids]
    for edge in edges:
        if len(edge) != 2:
            raise GraphError(f"edge {edge!r} must have two endpoints")
        a, b = edge
        if a == b:
            raise GraphError(f"self-loop at node {a}")
        for end in (a, b):
            if end not in index:
                raise GraphError(f"edge {[a, b]} names unknown node {end}")
        adj[index[a]].add(index[b])
        adj[index[b]].add(index[a])
    adj = tuple(tuple(sorted(s)) for s in adj)

    if demands is None and services is None:
        full = (1,) * len(ids)
        return Graph(ids, adj, (CLASSIC_LABEL,), full, full, "classic")
    if demands is None or services is None:
        raise GraphError("demands and services must be given together")
    demands = [tuple(d) for d in demands]
    services = [tuple(s) for s in services]
    if len(demands) != len(ids) or len(services) != len(ids):
        raise GraphError("demand/service arrays must cover every node")
    if labels is None:
        labels = sorted({x for group in demands + services for x in group})
    labels = tuple(labels)
    intern = {lab: b for b, lab in enumerate(labels)}

    def mask(group):
        m = 0
        for lab in group:
            if lab not in intern:
                raise GraphError(f"unknown label {lab!r}")
            m |= 1 << intern[lab]
        return m

    return Graph(
        ids,
        adj,
        labels,
        tuple(mask(d) for d in demands),
        tuple(mask(s) for s in services),
        "sdds",
    )


def load_graph(document: str | dict) -> Graph:
    """Parse a graph document (JSON text or an already-decoded dict)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise GraphError(f"malformed graph document: {exc}") from exc
    if not isinstance(document, dict):
        raise GraphError("graph document must be an object")
    mode = document.get("mode", "classic")
    if mode not in ("classic", "sdds"):
        raise GraphError(f"unknown mode {mode!r}")
    nodes = document.get("nodes")
    if not isinstance(nodes, list) or not nodes:
        raise GraphError("graph document needs a nonempty 'nodes' list")
    ids = []
    for pos, node in enumerate(nodes):
        if not isinstance(node, dict) or not isinstance(node.get("id"), int):
            raise GraphError(f"node #{pos} lacks an integer 'id'")
        ids.append(node["id"])
    edges = document.get("edges", [])
    if not isinstance(edges, list):
        raise GraphError("'edges' must be a list")
    if mode == "classic":
        return make_graph(ids, edges)
    demands, services = [], []
    for node in nodes:
        for key, out in (("demands", demands), ("services", services)):
            if not isinstance(node.get(key), list):
                raise GraphError(f"sdds node {node['id']} is missing '{key}'")
            out.append(node[key])
    labels = document.get("labels")
    return make_graph(ids, edges, demands, services, labels)


def dump_graph(graph: Graph) -> dict:
    """Inverse of :func:`load_graph`; returns a JSON-ready dict."""
    nodes = []
    for i, node_id in enumerate(graph.ids):
        node = {"id": node_id}
        if graph.mode == "sdds":
            node["demands"] = [graph.labels[b] for b in graph.demand_labels(i)]
            node["services"] = [graph.labels[b] for b in graph.service_labels(i)]
        nodes.append(node)
    doc = {"mode": graph.mode, "nodes": nodes}
    if graph.mode == "sdds":
        doc["labels"] = list(graph.labels)
    doc["edges"] = [[graph.ids[i], graph.ids[j]] for i, j in graph.edges]
    return doc


def generate_random_graph(n: int, edge_probability: float, demand_universe: int,
                          seed: int) -> Graph:
    """Erdos-Renyi graph with random nonempty demand/service subsets.

    Sampling order, from a single ``random.Random(seed)``: one ``random()``
    draw per pair ``(i, j)``, ``i < j`` in lexicographic order (edge iff the
    draw is below ``edge_probability``); then for each node in order, a
    demand mask and a service mask, each ``randrange(1, 2**universe)``.
    Node ids are ``1..n`` and labels are ``d0..d{universe-1}``.
    """
    if n < 1:
        raise GraphError("n must be positive")
    if not 0.0 <= edge_probability <= 1.0:
        raise GraphError("edge_probability must lie in [0, 1]")
    if demand_universe < 1:
        raise GraphError("demand_universe must be positive")
    if seed < 0:
        raise GraphError("seed must be unsigned")
    rng = random.Random(seed)
    adj = [set() for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_probability:
                adj[i].add(j)
                adj[j].add(i)
    demands, services = [], []
    for _ in range(n):
        demands.append(rng.randrange(1, 1 << demand_universe))
        services.append(rng.randrange(1, 1 << demand_universe))
    labels = tuple(f"d{b}" for b in range(demand_universe))
    return Graph(
        tuple(range(1, n + 1)),
        tuple(tuple(sorted(s)) for s in adj),
        labels,
        tuple(demands),
        tuple(services),
        "sdds",
    )


# Fixture topologies, all classic, ids 1..n.

def path_graph(n: int) -> Graph:
    return make_graph(range(1, n + 1), [(k, k + 1) for k in range(1, n)])


def complete_graph(n: int) -> Graph:
    ids = range(1, n + 1)
    return make_graph(ids, [(a, b) for a in ids for b in ids if a < b])


def star_graph(leaves: int) -> Graph:
    """Center is node 1."""
    return make_graph(range(1, leaves + 2), [(1, k) for k in range(2, leaves + 2)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least three nodes")
    return make_graph(range(1, n + 1),
                      [(k, k % n + 1) for k in range(1, n + 1)])


def fixtures() -> dict[str, Graph]:
    return {
        "P3": path_graph(3),
        "K2": complete_graph(2),
        "K3": complete_graph(3),
        "star4": star_graph(4),
        "C5": cycle_graph(5),
    }

from fractions import Fraction

import networkx as nx

from .address import Side, base_point, selector
from .base import MetricSpace
from .diamond import CycleSpace
from .line import LineSpace


class MaterializationCapError(ValueError):
    """Space has more points than the configured materialization cap."""


class ExplicitGraph(MetricSpace):
    """
    Shortest-path metric of an explicit weighted graph. Vertices are 0..n−1;
    `origin` optionally maps each vertex back to the address it materializes.
    """

    kind = "graph"

    def __init__(self, n, edges, origin=None, s=0, t=None):
        super().__init__()
        if n < 1:
            raise ValueError("Graph needs at least one vertex")
        self.graph = nx.Graph()
        self.graph.add_nodes_from(range(n))
        for u, v, length in edges:
            length = Fraction(length)
            if length <= 0:
                raise ValueError(f"Edge ({u}, {v}) has nonpositive length {length}")
            if self.graph.has_edge(u, v) and self.graph[u][v]["length"] <= length:
                continue
            self.graph.add_edge(u, v, length=length)
        if n > 1 and not nx.is_connected(self.graph):
            raise ValueError("Graph is disconnected; its shortest-path metric is not finite")
        self.origin = list(origin) if origin is not None else None
        self._vertex_of = {p: i for i, p in enumerate(self.origin)} if self.origin else {}
        self._s = base_point(s)
        self._t = base_point(n - 1 if t is None else t)
        self._sources = {}

    @property
    def n(self):
        return self.graph.number_of_nodes()

    @property
    def s(self):
        return self._s

    @property
    def t(self):
        return self._t

    @property
    def diameter(self):
        return max(max(self._from(u).values()) for u in range(self.n))

    def canonical(self, addr):
        if addr.levels or not 0 <= addr.base < self.n:
            raise ValueError(f"Address {addr} is not a vertex of this graph")
        return addr

    def _count(self):
        return self.n

    def _enumerate(self):
        return [base_point(i) for i in range(self.n)]

    def _from(self, source):
        if source not in self._sources:
            self._sources[source] = nx.single_source_dijkstra_path_length(self.graph, source, weight="length")
        return self._sources[source]

    def _distance(self, x, y):
        return Fraction(self._from(x.base)[y.base])

    def vertex_of(self, p):
        """Vertex materializing address p of the origin space."""
        return base_point(self._vertex_of[p])

    def edges(self):
        return sorted((u, v, d["length"]) for u, v, d in self.graph.edges(data=True))

    def to_edge_list(self):
        """`u v length` lines, one per edge."""
        return "".join(f"{u} {v} {length}\n" for u, v, length in self.edges())

    def descriptor(self):
        return {"kind": self.kind, "vertices": self.n, "edges": self.graph.number_of_edges()}


def parse_edge_list(text):
    edges = []
    n = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"Line {lineno}: expected 'u v length', got {raw!r}")
        u, v, length = int(parts[0]), int(parts[1]), Fraction(parts[2])
        edges.append((u, v, length))
        n = max(n, u + 1, v + 1)
    return ExplicitGraph(n, edges)


def _local_edges(space, memo):
    key = id(space)
    if key in memo:
        return memo[key]

    if isinstance(space, LineSpace):
        found = [(base_point(i), base_point(i + 1), space.unit) for i in range(space.beta)]
    elif isinstance(space, CycleSpace):
        best = {}
        for side_sel in _selectors(space):
            seg = space.segment(side_sel)
            for a, b, length in _local_edges(seg.space, memo):
                pa, pb = space.lift_point(side_sel, a), space.lift_point(side_sel, b)
                key_ab = (pa, pb) if pa < pb else (pb, pa)
                scaled = seg.scale * length
                if key_ab not in best or scaled < best[key_ab]:
                    best[key_ab] = scaled
        found = [(a, b, length) for (a, b), length in best.items()]
    elif isinstance(space, ExplicitGraph):
        found = [(base_point(u), base_point(v), length) for u, v, length in space.edges()]
    else:
        points = space.points()
        found = [
            (p, q, space.distance(p, q))
            for i, p in enumerate(points)
            for q in points[i + 1:]
        ]
    memo[key] = found
    return found


def _selectors(space):
    return [selector(side, index) for side in (Side.L, Side.R) for index in range(1, space.n + 1)]


def materialize_graph(space, cap=100_000):
    """Explicit weighted graph whose shortest-path metric equals `space.distance`."""
    count = space.point_count
    if count > cap:
        raise MaterializationCapError(f"{space.kind} space has {count} points, cap is {cap}")
    points = list(space.points())
    index = {p: i for i, p in enumerate(points)}
    edges = [(index[a], index[b], length) for a, b, length in _local_edges(space, {})]
    return ExplicitGraph(len(points), edges, origin=points, s=index[space.s], t=index[space.t])


def dijkstra_distances(space, cap=100_000):
    """All-pairs oracle: {(p, q): distance} from Dijkstra on the materialized graph."""
    graph = materialize_graph(space, cap)
    table = {}
    for i, p in enumerate(graph.origin):
        lengths = graph._from(i)
        for j, q in enumerate(graph.origin):
            table[(p, q)] = Fraction(lengths[j])
    return table


__all__ = [
    "ExplicitGraph",
    "MaterializationCapError",
    "materialize_graph",
    "parse_edge_list",
    "dijkstra_distances",
]

"""Layered graph of an MTS instance: one layer per task, edges d(x, y) + ρ[i](y)."""
import math
from fractions import Fraction

import networkx as nx

from ..metrics.address import format_addr

SINK = "sink"


def mts_to_layered_graph(space, costs, start=None):
    """
    Layer 0 holds the start state only; layer i holds every state with finite cost
    under task i. A zero-length edge from the last layer into SINK closes the graph.
    """
    start = space.s if start is None else start
    graph = nx.DiGraph()
    graph.add_node((0, start), layer=0, point=start)
    previous = [start]

    for i, vector in enumerate(costs, start=1):
        layer = [p for p in space.points() if vector.get(p, 0) != math.inf]
        for y in layer:
            graph.add_node((i, y), layer=i, point=y)
            service = Fraction(vector.get(y, 0))
            for x in previous:
                graph.add_edge((i - 1, x), (i, y), length=space.distance(x, y) + service)
        previous = layer

    graph.add_node(SINK, layer=len(costs) + 1, point=None)
    for x in previous:
        graph.add_edge((len(costs), x), SINK, length=Fraction(0))
    graph.graph["source"] = (0, start)
    return graph


def layered_shortest_path(graph):
    """(length, states visited in layers 1..T) of the shortest source → sink path."""
    length, path = nx.single_source_dijkstra(graph, graph.graph["source"], SINK, weight="length")
    states = [graph.nodes[v]["point"] for v in path[1:-1]]
    return Fraction(length), states


def export_layered_graph(graph):
    """`layer u v length` lines, one per edge, sink edges included."""
    lines = []
    for u, v, data in sorted(graph.edges(data=True), key=lambda e: (graph.nodes[e[0]]["layer"], str(e[0]), str(e[1]))):
        target = "sink" if v == SINK else format_addr(graph.nodes[v]["point"])
        lines.append(f"{graph.nodes[u]['layer']} {format_addr(graph.nodes[u]['point'])} {target} {data['length']}")
    return "\n".join(lines) + "\n"

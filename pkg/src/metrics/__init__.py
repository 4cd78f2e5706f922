from .address import PointAddr, Side, base_point, format_addr, parse_addr, selector
from .base import MetricSpace
from .descriptor import format_descriptor, load_descriptor, parse_descriptor, space_from_values
from .diamond import CycleSpace, Segment, diamond_basic, diamond_refined, lgt_variant, refined_base_level
from .graph import ExplicitGraph, MaterializationCapError, dijkstra_distances, materialize_graph, parse_edge_list
from .hst import (
    HstNode,
    HstSpace,
    format_hst,
    hst_preprocess,
    is_k_hst,
    parse_hst,
    random_hst,
    ultrametric_distance,
    uniform_hst,
)
from .line import LineSpace, UniformSpace, line_metric, uniform_metric


def distance(space, x, y):
    """Exact distance between canonical addresses x and y of `space`."""
    return space.distance(x, y)

"""Vertex partitions of sparse graphs into an independent set and a part
whose components have bounded order, plus the hardness reduction."""

__version__ = "0.1.0"

from .graph import Graph, build_graph, girth, parse_edge_list, format_edge_list  # noqa: E402
from .mad import mad_exact  # noqa: E402
from .partition import I, O, Color, PartitionSpec, exact_solve, verify  # noqa: E402

__all__ = [
    "Graph",
    "build_graph",
    "girth",
    "parse_edge_list",
    "format_edge_list",
    "mad_exact",
    "I",
    "O",
    "Color",
    "PartitionSpec",
    "exact_solve",
    "verify",
]

"""Geodesic (shortest-path) distance between graph locations."""

import networkx as nx

from graph_matern.graph.metric_graph import Location, MetricGraph
from graph_matern.graph.surgery import add_location_vertices


def geodesic_distance(graph: MetricGraph, s1: Location, s2: Location) -> float:
    """Length of the shortest path between two locations."""
    extended, (v1, v2) = add_location_vertices(graph, [s1, s2])
    if v1 == v2:
        return 0.0
    return float(nx.dijkstra_path_length(extended.nx_graph, v1, v2, weight="length"))

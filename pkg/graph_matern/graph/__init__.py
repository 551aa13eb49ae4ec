from graph_matern.graph.distance import geodesic_distance
from graph_matern.graph.locations import edge_grid, regular_locations, uniform_locations
from graph_matern.graph.metric_graph import (
    END,
    START,
    Edge,
    HalfEdge,
    Location,
    MetricGraph,
    build_graph,
)
from graph_matern.graph.surgery import (
    add_location_vertices,
    merge_degree2,
    split_loops,
    subdivide,
)

__all__ = [
    "END",
    "START",
    "Edge",
    "HalfEdge",
    "Location",
    "MetricGraph",
    "add_location_vertices",
    "build_graph",
    "edge_grid",
    "geodesic_distance",
    "merge_degree2",
    "regular_locations",
    "split_loops",
    "subdivide",
    "uniform_locations",
]

"""Designs of locations on a graph: uniform random, regular, and per-edge grids."""

import math

import numpy as np

from graph_matern.core.exceptions import InvalidParameterError
from graph_matern.graph.metric_graph import Location, MetricGraph


def uniform_locations(graph: MetricGraph, n: int, rng: np.random.Generator) -> list[Location]:
    """n locations drawn uniformly with respect to arc length."""
    lengths = np.array([edge.length for edge in graph.edges])
    picks = rng.choice(graph.n_edges, size=n, p=lengths / lengths.sum())
    ts = rng.uniform(0.0, 1.0, size=n) * lengths[picks]
    return [Location(graph.edges[e].id, float(t)) for e, t in zip(picks, ts, strict=True)]


def regular_locations(graph: MetricGraph, n: int) -> list[Location]:
    """n locations at arc-length positions (k + 1/2) L / n along the concatenated edges."""
    if n < 1:
        raise InvalidParameterError(f"need at least one location, got {n}", field="n", value=n)
    step = graph.total_length / n
    starts = np.concatenate([[0.0], np.cumsum([edge.length for edge in graph.edges])])
    locations = []
    for k in range(n):
        s = (k + 0.5) * step
        e = min(int(np.searchsorted(starts, s, side="right")) - 1, graph.n_edges - 1)
        edge = graph.edges[e]
        locations.append(Location(edge.id, float(min(s - starts[e], edge.length))))
    return locations


def edge_grid(graph: MetricGraph, resolution: float) -> list[Location]:
    """Equally spaced points (endpoints included) on every edge, about `resolution` per unit length."""
    if not resolution > 0:
        raise InvalidParameterError(
            f"resolution must be positive, got {resolution}", field="resolution", value=resolution
        )
    locations = []
    for edge in graph.edges:
        count = max(2, math.ceil(edge.length * resolution) + 1)
        locations.extend(Location(edge.id, float(t)) for t in np.linspace(0.0, edge.length, count))
    return locations

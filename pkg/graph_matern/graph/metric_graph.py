"""Metric-graph data model: vertices, edges with lengths, half-edge incidence."""

import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import networkx as nx
import numpy as np

from graph_matern.core.exceptions import GraphValidationError, InvalidObservationError
from graph_matern.core.logging_config import get_logger
from graph_matern.core.settings import settings

logger = get_logger(__name__)

START, END = 0, 1


@dataclass(frozen=True)
class Edge:
    """Edge parameterized by arc length t in [0, length], oriented start -> end.

    Pieces produced by surgery remember the edge they were cut from (``source``) and
    where their t = 0 sits on it (``offset``).
    """

    id: str
    start: int
    end: int
    length: float
    source: str | None = None
    offset: float = 0.0

    @property
    def is_loop(self) -> bool:
        return self.start == self.end

    @property
    def origin(self) -> str:
        return self.source if self.source is not None else self.id

    def endpoint(self, side: int) -> int:
        return self.start if side == START else self.end


class HalfEdge(NamedTuple):
    """Incidence of an edge at one of its ends."""

    edge: int
    side: int


@dataclass(frozen=True)
class Location:
    """Position on an edge: edge id and arc-length coordinate."""

    edge: str
    t: float


@dataclass(frozen=True, eq=False)
class MetricGraph:
    """Immutable compact metric graph; loops and multi-edges are allowed."""

    vertex_ids: tuple[str, ...]
    edges: tuple[Edge, ...]
    coordinates: tuple[tuple[float, float] | None, ...] = ()

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def total_length(self) -> float:
        return math.fsum(edge.length for edge in self.edges)

    @property
    def has_loops(self) -> bool:
        return any(edge.is_loop for edge in self.edges)

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {vid: i for i, vid in enumerate(self.vertex_ids)}

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {edge.id: i for i, edge in enumerate(self.edges)}

    @cached_property
    def pieces(self) -> dict[str, list[int]]:
        """Edge indices grouped by the edge they were cut from."""
        grouped: dict[str, list[int]] = defaultdict(list)
        for i, edge in enumerate(self.edges):
            if edge.source is not None:
                grouped[edge.source].append(i)
        return dict(grouped)

    @cached_property
    def incidence(self) -> tuple[tuple[HalfEdge, ...], ...]:
        """Half-edges at each vertex, ordered by (edge index, side)."""
        incident: list[list[HalfEdge]] = [[] for _ in self.vertex_ids]
        for i, edge in enumerate(self.edges):
            incident[edge.start].append(HalfEdge(i, START))
            incident[edge.end].append(HalfEdge(i, END))
        return tuple(tuple(sorted(h)) for h in incident)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(h) for h in self.incidence], dtype=int)

    def degree(self, vertex: int) -> int:
        return int(self.degrees[vertex])

    @cached_property
    def nx_graph(self) -> nx.Graph:
        """Simple weighted graph (shortest parallel edge kept, loops dropped)."""
        g = nx.Graph()
        g.add_nodes_from(range(self.n_vertices))
        for edge in self.edges:
            if edge.is_loop:
                continue
            if g.has_edge(edge.start, edge.end):
                if edge.length < g[edge.start][edge.end]["length"]:
                    g[edge.start][edge.end]["length"] = edge.length
            else:
                g.add_edge(edge.start, edge.end, length=edge.length)
        return g

    def locate(self, location: Location) -> tuple[int, float]:
        """Resolve a location to (edge index, local t), following surgery pieces."""
        tol = settings.COINCIDENCE_RTOL
        if location.edge in self.edge_index:
            i = self.edge_index[location.edge]
            return i, _checked_t(location, self.edges[i].length, tol)

        candidates = self.pieces.get(location.edge)
        if not candidates:
            raise InvalidObservationError(
                f"unknown edge '{location.edge}'", field="edge", value=location.edge
            )
        full = max(self.edges[i].offset + self.edges[i].length for i in candidates)
        t = _checked_t(location, full, tol)
        for i in candidates:
            piece = self.edges[i]
            if piece.offset - tol * full <= t <= piece.offset + piece.length + tol * full:
                return i, min(max(t - piece.offset, 0.0), piece.length)
        raise InvalidObservationError(
            f"location t={location.t} on edge '{location.edge}' falls outside its pieces",
            field="t",
            value=location.t,
        )

    def vertex_location(self, vertex: int) -> Location:
        """A location representing the vertex (start or end of its first half-edge)."""
        half = self.incidence[vertex][0]
        edge = self.edges[half.edge]
        return Location(edge.id, 0.0 if half.side == START else edge.length)

    def coordinate(self, vertex: int) -> tuple[float, float] | None:
        return self.coordinates[vertex] if self.coordinates else None


def _checked_t(location: Location, length: float, rtol: float) -> float:
    t = float(location.t)
    if not math.isfinite(t) or t < -rtol * length or t > length * (1.0 + rtol):
        raise InvalidObservationError(
            f"t={location.t} outside [0, {length}] on edge '{location.edge}'",
            field="t",
            value=location.t,
        )
    return min(max(t, 0.0), length)


def build_graph(
    vertex_ids: Sequence[str],
    edge_records: Iterable[tuple[str, str, str, float]],
    coordinates: Sequence[tuple[float, float] | None] | None = None,
) -> MetricGraph:
    """Validate vertex ids and (id, from, to, length) records into a connected MetricGraph."""
    ids = tuple(str(v) for v in vertex_ids)
    if not ids:
        raise GraphValidationError("graph has no vertices", field="vertices")

    seen: set[str] = set()
    for vid in ids:
        if vid in seen:
            raise GraphValidationError(f"duplicate vertex id '{vid}'", field="vertices", value=vid)
        seen.add(vid)
    index = {vid: i for i, vid in enumerate(ids)}

    edges: list[Edge] = []
    edge_ids: set[str] = set()
    for edge_id, start, end, length in edge_records:
        edge_id = str(edge_id)
        if edge_id in edge_ids:
            raise GraphValidationError(f"duplicate edge id '{edge_id}'", field="edges", value=edge_id)
        edge_ids.add(edge_id)
        for endpoint in (str(start), str(end)):
            if endpoint not in index:
                raise GraphValidationError(
                    f"edge '{edge_id}' refers to undeclared vertex '{endpoint}'",
                    field="edges",
                    value=endpoint,
                )
        length = float(length)
        if not math.isfinite(length) or length <= 0:
            raise GraphValidationError(
                f"edge '{edge_id}' has non-positive or non-finite length {length}",
                field="length",
                value=length,
            )
        edges.append(Edge(edge_id, index[str(start)], index[str(end)], length))

    coords: tuple[tuple[float, float] | None, ...] = ()
    if coordinates is not None:
        if len(coordinates) != len(ids):
            raise GraphValidationError("coordinates do not match vertices", field="coordinates")
        coords = tuple(coordinates)

    graph = MetricGraph(ids, tuple(edges), coords)
    if not nx.is_connected(graph.nx_graph):
        n_parts = nx.number_connected_components(graph.nx_graph)
        raise GraphValidationError(f"graph is disconnected ({n_parts} components)")

    logger.debug(f"Built graph with {graph.n_vertices} vertices and {graph.n_edges} edges")
    return graph

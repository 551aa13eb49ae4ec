"""Distribution-preserving graph surgery: degree-2 insertion/removal, loop splitting, subdivision."""

import math
from collections import defaultdict
from collections.abc import Sequence

from graph_matern.core.exceptions import InvalidParameterError
from graph_matern.core.logging_config import get_logger
from graph_matern.core.settings import settings
from graph_matern.graph.metric_graph import END, START, Edge, Location, MetricGraph

logger = get_logger(__name__)


def _fresh(base: str, taken: set[str]) -> str:
    name, k = base, 1
    while name in taken:
        name = f"{base}~{k}"
        k += 1
    taken.add(name)
    return name


def _interpolate(graph: MetricGraph, edge: Edge, t: float) -> tuple[float, float] | None:
    a, b = graph.coordinate(edge.start), graph.coordinate(edge.end)
    if a is None or b is None or edge.is_loop:
        return None
    w = t / edge.length
    return (a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1]))


def add_location_vertices(
    graph: MetricGraph, locations: Sequence[Location]
) -> tuple[MetricGraph, list[int]]:
    """Insert degree-2 vertices at interior locations.

    Returns the extended graph and, for every input location, the index of the vertex it
    maps to. Locations within the coincidence tolerance of an endpoint or of each other
    share a vertex. Split edges are replaced in place by their pieces.
    """
    rtol = settings.COINCIDENCE_RTOL
    mapping: list[int] = [-1] * len(locations)
    interior: dict[int, list[tuple[float, int]]] = defaultdict(list)

    for i, location in enumerate(locations):
        e, t = graph.locate(location)
        edge = graph.edges[e]
        tol = rtol * edge.length
        if t <= tol:
            mapping[i] = edge.start
        elif t >= edge.length - tol:
            mapping[i] = edge.end
        else:
            interior[e].append((t, i))

    if not interior:
        return graph, mapping

    vertex_ids = list(graph.vertex_ids)
    coordinates = list(graph.coordinates)
    vertex_taken = set(vertex_ids)
    edge_taken = {edge.id for edge in graph.edges}
    edges: list[Edge] = []

    for e, edge in enumerate(graph.edges):
        points = interior.get(e)
        if not points:
            edges.append(edge)
            continue

        tol = rtol * edge.length
        cuts: list[tuple[float, int]] = []
        for t, i in sorted(points):
            if cuts and t - cuts[-1][0] <= tol:
                mapping[i] = cuts[-1][1]
                continue
            v = len(vertex_ids)
            vertex_ids.append(_fresh(f"{edge.id}#{len(cuts)}", vertex_taken))
            if coordinates:
                coordinates.append(_interpolate(graph, edge, t))
            cuts.append((t, v))
            mapping[i] = v

        bounds = [0.0] + [t for t, _ in cuts] + [edge.length]
        ends = [edge.start] + [v for _, v in cuts] + [edge.end]
        for k in range(len(bounds) - 1):
            edges.append(
                Edge(
                    id=_fresh(f"{edge.id}.{k}", edge_taken),
                    start=ends[k],
                    end=ends[k + 1],
                    length=bounds[k + 1] - bounds[k],
                    source=edge.origin,
                    offset=edge.offset + bounds[k],
                )
            )

    extended = MetricGraph(tuple(vertex_ids), tuple(edges), tuple(coordinates))
    logger.debug(
        f"Inserted {extended.n_vertices - graph.n_vertices} location vertices "
        f"({len(locations)} locations)"
    )
    return extended, mapping


def _merge_pair(graph: MetricGraph, edges: list[Edge], vertex: int) -> Edge:
    h1, h2 = graph.incidence[vertex]
    e1, e2 = edges[h1.edge], edges[h2.edge]
    a = e1.endpoint(END if h1.side == START else START)
    b = e2.endpoint(END if h2.side == START else START)
    length = e1.length + e2.length

    contiguous = (
        e1.origin == e2.origin
        and h1.side == END
        and h2.side == START
        and math.isclose(e1.offset + e1.length, e2.offset, rel_tol=0.0, abs_tol=1e-9 * length)
    )
    taken = {edge.id for i, edge in enumerate(edges) if i not in (h1.edge, h2.edge)}
    if contiguous:
        others = [
            edge for i, edge in enumerate(edges) if i not in (h1.edge, h2.edge) and edge.origin == e1.origin
        ]
        if not others and e1.offset == 0.0 and e1.origin not in taken:
            return Edge(e1.origin, a, b, length)
        return Edge(_fresh(f"{e1.id}+{e2.id}", taken), a, b, length, e1.origin, e1.offset)
    return Edge(_fresh(f"{e1.id}+{e2.id}", taken), a, b, length)


def merge_degree2(graph: MetricGraph) -> MetricGraph:
    """Remove degree-2 vertices, merging their two edges; a vertex carrying only a loop stays."""
    current = graph
    removed = 0
    while True:
        candidates = [
            v
            for v in reversed(range(current.n_vertices))
            if current.degree(v) == 2
            and current.incidence[v][0].edge != current.incidence[v][1].edge
        ]
        if not candidates:
            break

        v = candidates[0]
        edges = list(current.edges)
        merged = _merge_pair(current, edges, v)
        first, second = sorted(h.edge for h in current.incidence[v])
        edges[first] = merged
        del edges[second]

        def shift(i: int, v: int = v) -> int:
            return i - 1 if i > v else i

        edges = [
            Edge(e.id, shift(e.start), shift(e.end), e.length, e.source, e.offset) for e in edges
        ]
        vertex_ids = current.vertex_ids[:v] + current.vertex_ids[v + 1 :]
        coordinates = current.coordinates[:v] + current.coordinates[v + 1 :] if current.coordinates else ()
        current = MetricGraph(vertex_ids, tuple(edges), coordinates)
        removed += 1

    logger.debug(f"Merged away {removed} degree-2 vertices")
    return current


def split_loops(graph: MetricGraph) -> MetricGraph:
    """Insert a vertex at the midpoint of every loop."""
    midpoints = [Location(edge.id, edge.length / 2.0) for edge in graph.edges if edge.is_loop]
    if not midpoints:
        return graph
    split, _ = add_location_vertices(graph, midpoints)
    return split


def subdivide(graph: MetricGraph, h: float) -> MetricGraph:
    """Cut every edge into pieces of length h; h must divide every edge length."""
    if not h > 0:
        raise InvalidParameterError(f"mesh width must be positive, got {h}", field="h", value=h)

    locations = []
    for edge in graph.edges:
        pieces = round(edge.length / h)
        if pieces < 1 or abs(pieces * h - edge.length) > 1e-9 * edge.length:
            raise InvalidParameterError(
                f"mesh width {h} does not divide length {edge.length} of edge '{edge.id}'",
                field="h",
                value=h,
            )
        step = edge.length / pieces
        locations.extend(Location(edge.id, k * step) for k in range(1, pieces))

    subdivided, _ = add_location_vertices(graph, locations)
    return subdivided

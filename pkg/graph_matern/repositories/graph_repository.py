"""Graph JSON documents: `{"vertices": [{"id", "x", "y"}], "edges": [{"id", "from", "to", "length"}]}`."""

import json
from pathlib import Path

from pydantic import ValidationError as PydanticValidationError

from graph_matern.core.exceptions import InputParseError
from graph_matern.core.logging_config import get_logger
from graph_matern.graph.metric_graph import MetricGraph, build_graph
from graph_matern.models.graph import EdgeRecord, GraphDocument, VertexRecord

logger = get_logger(__name__)


class GraphRepository:
    """Load and save metric graphs."""

    def load(self, path: str | Path) -> MetricGraph:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise InputParseError(str(path), e.strerror or str(e)) from e
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputParseError(str(path), e.msg, line=e.lineno) from e
        try:
            document = GraphDocument.model_validate(raw)
        except PydanticValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(part) for part in first["loc"])
            raise InputParseError(str(path), f"{where}: {first['msg']}") from e

        return self.to_graph(document)

    @staticmethod
    def to_graph(document: GraphDocument) -> MetricGraph:
        coordinates = None
        if any(v.x is not None and v.y is not None for v in document.vertices):
            coordinates = [(v.x, v.y) if v.x is not None and v.y is not None else None for v in document.vertices]
        graph = build_graph(
            [v.id for v in document.vertices],
            [(e.id, e.start, e.end, e.length) for e in document.edges],
            coordinates,
        )
        logger.info(f"Loaded graph: {graph.n_vertices} vertices, {graph.n_edges} edges")
        return graph

    @staticmethod
    def to_document(graph: MetricGraph) -> GraphDocument:
        vertices = []
        for v, vertex_id in enumerate(graph.vertex_ids):
            xy = graph.coordinate(v)
            vertices.append(VertexRecord(id=vertex_id, x=xy[0] if xy else None, y=xy[1] if xy else None))
        edges = [
            EdgeRecord(id=e.id, start=graph.vertex_ids[e.start], end=graph.vertex_ids[e.end], length=e.length)
            for e in graph.edges
        ]
        return GraphDocument(vertices=vertices, edges=edges)

    def save(self, path: str | Path, graph: MetricGraph) -> None:
        document = self.to_document(graph)
        Path(path).write_text(
            json.dumps(document.model_dump(by_alias=True, exclude_none=True), indent=2) + "\n", encoding="utf-8"
        )
        logger.info(f"Wrote graph to {path}")

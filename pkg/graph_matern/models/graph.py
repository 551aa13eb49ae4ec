"""Pydantic schemas for the JSON graph document."""

from pydantic import BaseModel, ConfigDict, Field, field_validator


class VertexRecord(BaseModel):
    """A vertex with optional planar coordinates (used for output only)."""

    id: str
    x: float | None = None
    y: float | None = None

    @field_validator("id", mode="before")
    @classmethod
    def _coerce_id(cls, value: object) -> object:
        return str(value) if isinstance(value, int) else value


class EdgeRecord(BaseModel):
    """An edge between two declared vertices."""

    id: str
    start: str = Field(..., alias="from")
    end: str = Field(..., alias="to")
    length: float

    model_config = ConfigDict(populate_by_name=True)

    @field_validator("id", "start", "end", mode="before")
    @classmethod
    def _coerce_id(cls, value: object) -> object:
        return str(value) if isinstance(value, int) else value


class GraphDocument(BaseModel):
    """Top-level graph file."""

    vertices: list[VertexRecord]
    edges: list[EdgeRecord]

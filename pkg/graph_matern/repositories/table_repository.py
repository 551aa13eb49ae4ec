"""Result tables (fits, scores, experiments, benchmarks) as CSV."""

from collections.abc import Sequence
from pathlib import Path

from pydantic import BaseModel

from graph_matern.repositories.base import CsvRepository


def write_table(path: str | Path, rows: Sequence[BaseModel], columns: Sequence[str] | None = None) -> int:
    """Write homogeneous result rows; columns default to the model's fields."""
    if not rows:
        return CsvRepository(BaseModel).save(path, [], columns=columns or [])
    return CsvRepository(type(rows[0])).save(path, rows, columns=columns)

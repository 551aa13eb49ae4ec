"""Base repository for delimited text files validated row by row."""

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Generic, TypeVar

from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from graph_matern.core.exceptions import InputParseError
from graph_matern.core.logging_config import get_logger
from graph_matern.core.settings import settings

logger = get_logger(__name__)

RowType = TypeVar("RowType", bound=BaseModel)


def format_value(value: object, digits: int | None = None) -> str:
    """Floats at full precision (17 significant digits by default), everything else as str."""
    if isinstance(value, float):
        return f"{value:.{digits or settings.CSV_DIGITS}g}"
    return str(value)


class CsvRepository(Generic[RowType]):
    """Read and write CSV files whose rows validate against a pydantic model."""

    def __init__(self, row_model: type[RowType]):
        self.row_model = row_model
        self.columns = list(row_model.model_fields)

    def load(self, path: str | Path) -> list[RowType]:
        """Parse every data row; errors carry the 1-based line number."""
        path = Path(path)
        try:
            handle = open(path, encoding="utf-8", newline="")
        except OSError as e:
            raise InputParseError(str(path), e.strerror or str(e)) from e

        rows: list[RowType] = []
        with handle:
            reader = csv.DictReader(handle)
            header = reader.fieldnames or []
            missing = [c for c in self.columns if c not in header]
            if missing:
                raise InputParseError(str(path), f"missing column(s) {', '.join(missing)}", line=1)
            for record in reader:
                line = reader.line_num
                if None in record or any(record.get(c) is None for c in self.columns):
                    raise InputParseError(str(path), "wrong number of fields", line=line)
                try:
                    rows.append(self.row_model.model_validate({c: record[c] for c in self.columns}))
                except PydanticValidationError as e:
                    first = e.errors()[0]
                    field = ".".join(str(part) for part in first["loc"])
                    raise InputParseError(str(path), f"{field}: {first['msg']}", line=line) from e

        logger.debug(f"Loaded {len(rows)} {self.row_model.__name__} rows from {path}")
        return rows

    def save(self, path: str | Path, rows: Iterable[RowType], columns: Sequence[str] | None = None) -> int:
        """Write rows with a header; returns the number of rows written."""
        columns = list(columns or self.columns)
        count = 0
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                data = row.model_dump()
                writer.writerow([format_value(data[c]) for c in columns])
                count += 1
        logger.info(f"Wrote {count} rows to {path}")
        return count

"""Observation sets: field values (possibly noisy) at graph locations."""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from graph_matern.core.exceptions import InvalidObservationError
from graph_matern.graph.metric_graph import Location


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Values y_i observed at locations s_i. The noise level lives on ModelParams.sigma."""

    locations: tuple[Location, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.size != len(self.locations):
            raise InvalidObservationError(
                f"{len(self.locations)} locations but {values.size} values", field="values"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidObservationError("observed values must be finite", field="values")
        object.__setattr__(self, "locations", tuple(self.locations))
        object.__setattr__(self, "values", values)

    @classmethod
    def from_arrays(cls, edges: Sequence[str], ts: Sequence[float], values: Sequence[float]) -> "ObservationSet":
        locations = tuple(Location(str(e), float(t)) for e, t in zip(edges, ts, strict=True))
        return cls(locations, np.asarray(values, dtype=float))

    @property
    def n(self) -> int:
        return len(self.locations)

    def subset(self, index: np.ndarray | Sequence[int]) -> "ObservationSet":
        index = np.asarray(index, dtype=int)
        return ObservationSet(tuple(self.locations[i] for i in index), self.values[index])


def require_distinct(vertices: Sequence[int], what: str = "direct observations") -> None:
    """Direct (noise-free) observations must sit at distinct points."""
    if len(set(vertices)) != len(vertices):
        raise InvalidObservationError(f"{what} require distinct locations (sigma = 0)", field="locations")

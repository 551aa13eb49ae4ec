"""Observation, location and result CSV files."""

from collections.abc import Sequence
from pathlib import Path

import numpy as np

from graph_matern.core.exceptions import InputParseError
from graph_matern.graph.metric_graph import Location
from graph_matern.inference.observations import ObservationSet
from graph_matern.models.records import LocationRecord, ObservationRecord, PredictionRecord
from graph_matern.models.results import GaussianPredictive, VariancePoint
from graph_matern.repositories.base import CsvRepository


class ObservationRepository:
    """`edge_id,t,value` observations, `edge_id,t` locations and `edge_id,t,mean,var` predictions."""

    def __init__(self) -> None:
        self.observations = CsvRepository(ObservationRecord)
        self.locations = CsvRepository(LocationRecord)
        self.predictions = CsvRepository(PredictionRecord)

    def load_observations(self, path: str | Path) -> ObservationSet:
        rows = self.observations.load(path)
        if not rows:
            raise InputParseError(str(path), "no observations")
        return ObservationSet(
            tuple(Location(r.edge_id, r.t) for r in rows), np.array([r.value for r in rows])
        )

    def load_locations(self, path: str | Path) -> list[Location]:
        rows = self.locations.load(path)
        if not rows:
            raise InputParseError(str(path), "no locations")
        return [Location(r.edge_id, r.t) for r in rows]

    def write_observations(self, path: str | Path, obs: ObservationSet) -> int:
        rows = (
            ObservationRecord(edge_id=loc.edge, t=loc.t, value=float(v))
            for loc, v in zip(obs.locations, obs.values, strict=True)
        )
        return self.observations.save(path, rows)

    def write_predictions(self, path: str | Path, predictives: Sequence[GaussianPredictive]) -> int:
        rows = (PredictionRecord(edge_id=p.edge, t=p.t, mean=p.mean, var=p.var) for p in predictives)
        return self.predictions.save(path, rows)

    def write_variance_map(self, path: str | Path, points: Sequence[VariancePoint]) -> int:
        rows = (PredictionRecord(edge_id=p.edge, t=p.t, mean=0.0, var=p.var) for p in points)
        return self.predictions.save(path, rows, columns=["edge_id", "t", "var"])

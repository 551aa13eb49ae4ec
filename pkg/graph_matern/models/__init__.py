from graph_matern.models.graph import EdgeRecord, GraphDocument, VertexRecord
from graph_matern.models.params import BoundaryMode, CandidateModel, ModelParams
from graph_matern.models.records import LocationRecord, ObservationRecord, PredictionRecord
from graph_matern.models.results import (
    BenchmarkRow,
    ConsistencyRow,
    CrossValidationRow,
    FitResult,
    FitRow,
    GaussianPredictive,
    KappaLimitRow,
    MisspecificationRow,
    ProfilePoint,
    ScoreSummary,
    SubdivisionRow,
    VariancePoint,
)

__all__ = [
    "BenchmarkRow",
    "BoundaryMode",
    "CandidateModel",
    "ConsistencyRow",
    "CrossValidationRow",
    "EdgeRecord",
    "FitResult",
    "FitRow",
    "GaussianPredictive",
    "GraphDocument",
    "KappaLimitRow",
    "LocationRecord",
    "MisspecificationRow",
    "ModelParams",
    "ObservationRecord",
    "PredictionRecord",
    "ProfilePoint",
    "ScoreSummary",
    "SubdivisionRow",
    "VariancePoint",
    "VertexRecord",
]

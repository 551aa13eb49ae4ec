"""K-fold pseudo cross-validation of candidate models with Gaussian scores."""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from graph_matern.core.exceptions import InvalidObservationError, InvalidParameterError
from graph_matern.core.logging_config import get_logger
from graph_matern.core.settings import settings
from graph_matern.estimation.mle import DEFAULT_KAPPA_BOUNDS, MIN_OBSERVATIONS, fit_mle
from graph_matern.estimation.scoring import pointwise_scores, summarize
from graph_matern.graph.metric_graph import MetricGraph
from graph_matern.inference.kriging import krig
from graph_matern.inference.observations import ObservationSet
from graph_matern.models.params import CandidateModel
from graph_matern.models.results import CrossValidationRow, ScoreSummary

logger = get_logger(__name__)


def fold_assignment(n: int, folds: int, seed: int | None = None) -> np.ndarray:
    """Fold label of every observation: seeded shuffle, then round-robin."""
    if folds < 2:
        raise InvalidParameterError(f"need at least 2 folds, got {folds}", field="folds", value=folds)
    order = np.random.default_rng(seed).permutation(n)
    labels = np.empty(n, dtype=int)
    labels[order] = np.arange(n) % folds
    return labels


def _score_fold(
    graph: MetricGraph,
    obs: ObservationSet,
    model: CandidateModel,
    held_out: np.ndarray,
    kappa_bounds: tuple[float, float],
) -> ScoreSummary:
    train = obs.subset(np.flatnonzero(~held_out))
    test = obs.subset(np.flatnonzero(held_out))
    fit = fit_mle(graph, train, model.alpha, kappa_bounds, boundary=model.boundary)
    predictives = krig(graph, fit.params, train, test.locations, predictive=True)
    return summarize(pointwise_scores(predictives, test.values))


def average_folds(summaries: Sequence[ScoreSummary]) -> ScoreSummary:
    """Unweighted mean of the per-fold scores."""
    return ScoreSummary(
        **{name: float(np.mean([getattr(s, name) for s in summaries])) for name in ScoreSummary.model_fields}
    )


def cross_validate(
    graph: MetricGraph,
    obs: ObservationSet,
    models: Sequence[CandidateModel],
    folds: int = 5,
    seed: int | None = None,
    kappa_bounds: tuple[float, float] = DEFAULT_KAPPA_BOUNDS,
) -> list[CrossValidationRow]:
    """Per model: fold-averaged scores and the full-data negative log-likelihood."""
    if obs.n < folds:
        raise InvalidObservationError(f"{obs.n} observations cannot fill {folds} folds", field="folds")
    labels = fold_assignment(obs.n, folds, seed)
    for k in range(folds):
        if np.count_nonzero(labels != k) < MIN_OBSERVATIONS:
            raise InvalidObservationError(
                f"fold {k} leaves fewer than {MIN_OBSERVATIONS} training observations", field="folds"
            )

    rows = []
    for model in models:
        with ThreadPoolExecutor(max_workers=settings.NUM_THREADS) as pool:
            per_fold = list(
                pool.map(lambda k, m=model: _score_fold(graph, obs, m, labels == k, kappa_bounds), range(folds))
            )
        summary = average_folds(per_fold)
        full_fit = fit_mle(graph, obs, model.alpha, kappa_bounds, boundary=model.boundary)
        rows.append(CrossValidationRow(model=model.name, negloglik=-full_fit.loglik, **summary.model_dump()))
        logger.info(f"Cross-validation {model.name}: crps={summary.crps:.6g}, negloglik={-full_fit.loglik:.6g}")
    return rows

"""Proper scoring rules for Gaussian predictive distributions; lower is better for all."""

from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy.stats import norm

from graph_matern.core.exceptions import InvalidObservationError
from graph_matern.models.results import GaussianPredictive, ScoreSummary

SQRT_PI = np.sqrt(np.pi)


def _standardize(mean: ArrayLike, sd: ArrayLike, y: ArrayLike) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mean, sd, y = np.broadcast_arrays(
        np.asarray(mean, dtype=float), np.asarray(sd, dtype=float), np.asarray(y, dtype=float)
    )
    if np.any(sd < 0):
        raise InvalidObservationError("predictive standard deviations must be non-negative", field="sd")
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sd > 0, (y - mean) / np.where(sd > 0, sd, 1.0), 0.0)
    return z, sd, np.abs(y - mean)


def expected_abs_error(mean: ArrayLike, sd: ArrayLike, y: ArrayLike) -> np.ndarray:
    """E|X - y| for X ~ N(mean, sd^2)."""
    z, sd, abs_error = _standardize(mean, sd, y)
    value = sd * (z * (2.0 * norm.cdf(z) - 1.0) + 2.0 * norm.pdf(z))
    return np.where(sd > 0, value, abs_error)


def crps_gaussian(mean: ArrayLike, sd: ArrayLike, y: ArrayLike) -> np.ndarray:
    """Closed-form CRPS: E|X - y| - E|X - X'| / 2 with E|X - X'| = 2 sd / sqrt(pi)."""
    _, sd, _ = _standardize(mean, sd, y)
    return expected_abs_error(mean, sd, y) - sd / SQRT_PI


def scrps_gaussian(mean: ArrayLike, sd: ArrayLike, y: ArrayLike) -> np.ndarray:
    """Scaled CRPS: E|X - y| / E|X - X'| + log(E|X - X'|) / 2."""
    _, sd, _ = _standardize(mean, sd, y)
    spread = np.where(sd > 0, 2.0 * sd / SQRT_PI, 1.0)
    value = expected_abs_error(mean, sd, y) / spread + 0.5 * np.log(spread)
    return np.where(sd > 0, value, np.inf)


def log_score(mean: ArrayLike, sd: ArrayLike, y: ArrayLike) -> np.ndarray:
    """Negative log predictive density; a point mass scores -inf on target and +inf off it."""
    _, sd, abs_error = _standardize(mean, sd, y)
    safe = np.where(sd > 0, sd, 1.0)
    value = -norm.logpdf(np.asarray(y, dtype=float), loc=np.asarray(mean, dtype=float), scale=safe)
    degenerate = np.where(abs_error > 0, np.inf, -np.inf)
    return np.where(sd > 0, value, degenerate)


def pointwise_scores(predictives: Sequence[GaussianPredictive], y: ArrayLike) -> dict[str, np.ndarray]:
    y = np.asarray(y, dtype=float)
    if y.size != len(predictives):
        raise InvalidObservationError(f"{len(predictives)} predictions but {y.size} values", field="values")
    mean = np.array([p.mean for p in predictives])
    sd = np.array([p.sd for p in predictives])
    return {
        "error": y - mean,
        "ls": log_score(mean, sd, y),
        "crps": crps_gaussian(mean, sd, y),
        "scrps": scrps_gaussian(mean, sd, y),
    }


def summarize(pointwise: dict[str, np.ndarray]) -> ScoreSummary:
    error = pointwise["error"]
    return ScoreSummary(
        rmse=float(np.sqrt(np.mean(error**2))),
        mae=float(np.mean(np.abs(error))),
        ls=float(np.mean(pointwise["ls"])),
        crps=float(np.mean(pointwise["crps"])),
        scrps=float(np.mean(pointwise["scrps"])),
    )


def scores(predictives: Sequence[GaussianPredictive], y: ArrayLike) -> ScoreSummary:
    """RMSE, MAE, LS, CRPS and SCRPS averaged over predictions."""
    return summarize(pointwise_scores(predictives, y))

"""Dense Gaussian conditioning: prior N(0, Q^{-1}), exact constraints K U = b, then y = B U + e.

Textbook formulas on explicit covariance matrices, independent of the sparse code paths.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.stats import multivariate_normal

from graph_matern.core.exceptions import ResourceLimitError
from graph_matern.core.settings import settings


@dataclass(frozen=True, eq=False)
class DenseOracleResult:
    loglik: float
    mean: np.ndarray
    covariance: np.ndarray


def dense_constrained_oracle(
    precision: np.ndarray,
    K: np.ndarray,
    B: np.ndarray,
    noise: np.ndarray,
    y: np.ndarray,
    b: np.ndarray | None = None,
) -> DenseOracleResult:
    """log p(y | K U = b) and the moments of U | K U = b, y."""
    precision = np.asarray(precision, dtype=float)
    n = precision.shape[0]
    if n > settings.DENSE_MAX_DOFS:
        raise ResourceLimitError("dense oracle", n, settings.DENSE_MAX_DOFS)
    K = np.asarray(K, dtype=float).reshape(-1, n)
    B = np.asarray(B, dtype=float).reshape(-1, n)
    y = np.asarray(y, dtype=float)
    b = np.zeros(K.shape[0]) if b is None else np.asarray(b, dtype=float)

    prior = np.linalg.inv(precision)
    prior = 0.5 * (prior + prior.T)
    mean = np.zeros(n)
    cov = prior
    if K.shape[0]:
        gram = K @ cov @ K.T
        gain = np.linalg.solve(gram, K @ cov).T
        mean = gain @ b
        cov = cov - gain @ K @ cov
        cov = 0.5 * (cov + cov.T)

    if B.shape[0] == 0:
        return DenseOracleResult(0.0, mean, cov)

    predicted = B @ cov @ B.T + np.asarray(noise, dtype=float)
    predicted = 0.5 * (predicted + predicted.T)
    loglik = float(multivariate_normal(mean=B @ mean, cov=predicted).logpdf(y))

    factor = cho_factor(predicted, lower=True)
    gain = cho_solve(factor, B @ cov).T
    post_mean = mean + gain @ (y - B @ mean)
    post_cov = cov - gain @ B @ cov
    return DenseOracleResult(loglik, post_mean, 0.5 * (post_cov + post_cov.T))

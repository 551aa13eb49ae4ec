"""Canonical-form Gaussian update shared by every sparse evaluator.

For x ~ N(mu, Q^{-1}) and y = B x + e, e ~ N(0, Sigma), the posterior precision is
Q + B^T Sigma^{-1} B and the marginal density of y follows from three log-determinants.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from graph_matern.inference.covariance import BlockDiagonalCovariance
from graph_matern.precision.factor import SparseCholesky

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class CanonicalUpdate:
    loglik: float
    precision: sp.csc_matrix
    factor: SparseCholesky
    mean: np.ndarray


def canonical_update(
    prior_precision: sp.spmatrix,
    prior_factor: SparseCholesky,
    prior_mean: np.ndarray,
    design: sp.spmatrix,
    noise: BlockDiagonalCovariance,
    y: np.ndarray,
) -> CanonicalUpdate:
    """Posterior of x and log p(y) for a sparse Gaussian prior and block-diagonal noise."""
    y = np.asarray(y, dtype=float)
    whitened = noise.whiten_matrix(design)
    r_w = noise.whiten(y)

    q_post = sp.csc_matrix(prior_precision + whitened.T @ whitened)
    factor = SparseCholesky(q_post, "posterior precision")
    rhs = prior_precision @ prior_mean + whitened.T @ r_w
    mean = factor.solve(rhs)

    quad = float(r_w @ r_w + prior_mean @ (prior_precision @ prior_mean) - mean @ rhs)
    loglik = (
        0.5 * prior_factor.logdet
        - 0.5 * noise.logdet()
        - 0.5 * factor.logdet
        - 0.5 * y.size * LOG_2PI
        - 0.5 * quad
    )
    return CanonicalUpdate(float(loglik), q_post, factor, mean)


def schur_marginal_loglik(
    precision: sp.spmatrix,
    factor: SparseCholesky,
    mean: np.ndarray,
    observed: np.ndarray,
    values: np.ndarray,
) -> tuple[float, np.ndarray, np.ndarray, SparseCholesky]:
    """log density of an exactly observed sub-vector x_O = values of x ~ N(mean, Q^{-1}).

    Returns (loglik, remaining indices, their conditional mean, factor of Q_RR). The marginal
    precision of x_O is the Schur complement Q_OO - Q_OR Q_RR^{-1} Q_RO, and its log-determinant
    is log|Q| - log|Q_RR|.
    """
    q = sp.csc_matrix(precision)
    observed = np.asarray(observed, dtype=int)
    remaining = np.setdiff1d(np.arange(q.shape[0]), observed)
    q_rows = q[remaining]
    q_rr = q_rows[:, remaining].tocsc()
    q_ro = q_rows[:, observed]
    q_oo = q[observed][:, observed]

    rr_factor = SparseCholesky(q_rr, "conditional precision")
    d = np.asarray(values, dtype=float) - mean[observed]
    coupling = q_ro @ d
    shift = rr_factor.solve(coupling)
    quad = float(d @ (q_oo @ d) - coupling @ shift)
    loglik = 0.5 * (factor.logdet - rr_factor.logdet) - 0.5 * observed.size * LOG_2PI - 0.5 * quad
    return float(loglik), remaining, mean[remaining] - shift, rr_factor

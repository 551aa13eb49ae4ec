"""Stationary Matérn kernel for alpha in {1, 2} and its derivative kernels.

Closed forms (c is the stationary variance):
    alpha = 1:  rho(h) = c exp(-kappa |h|),               c = 1 / (2 kappa tau^2)
    alpha = 2:  rho(h) = c (1 + kappa |h|) exp(-kappa |h|), c = 1 / (4 kappa^3 tau^2)

The joint process X(t) = (u(t), u'(t)) for alpha = 2 has cross-covariance
Cov(X(s), X(t)) = deriv_kernel_matrix(t, s).
"""

import numpy as np
from numpy.typing import ArrayLike

from graph_matern.core.exceptions import InvalidParameterError
from graph_matern.models.params import ModelParams


def _check_alpha(params: ModelParams) -> int:
    if params.alpha not in (1, 2):
        raise InvalidParameterError(
            f"alpha must be 1 or 2, got {params.alpha}", field="alpha", value=params.alpha
        )
    return params.alpha


def marginal_variance(params: ModelParams) -> float:
    """Stationary variance rho(0)."""
    alpha = _check_alpha(params)
    kappa, tau2 = params.kappa, params.tau**2
    if alpha == 1:
        return 1.0 / (2.0 * kappa * tau2)
    return 1.0 / (4.0 * kappa**3 * tau2)


def _as_output(values: np.ndarray, like: ArrayLike) -> np.ndarray | float:
    return float(values) if np.ndim(like) == 0 else values


def matern_derivatives(params: ModelParams, h: ArrayLike) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """rho, rho' and rho'' at signed lags h (rho' and rho'' only meaningful for alpha = 2)."""
    alpha = _check_alpha(params)
    h = np.asarray(h, dtype=float)
    kappa = params.kappa
    c = marginal_variance(params)
    a = np.abs(h)
    decay = np.exp(-kappa * a)
    if alpha == 1:
        rho = c * decay
        d1 = -c * kappa * np.sign(h) * decay
        d2 = c * kappa**2 * decay
        return rho, d1, d2
    rho = c * (1.0 + kappa * a) * decay
    d1 = -c * kappa**2 * h * decay
    d2 = c * kappa**2 * (kappa * a - 1.0) * decay
    return rho, d1, d2


def matern_cov(params: ModelParams, h: ArrayLike) -> np.ndarray | float:
    """Stationary Matérn covariance at lag h."""
    rho, _, _ = matern_derivatives(params, h)
    return _as_output(rho, h)


def deriv_kernel_matrix(params: ModelParams, t1: float, t2: float) -> np.ndarray:
    """alpha x alpha matrix with entry (i, j) = d^i/dt2^i d^j/dt1^j rho(t1 - t2)."""
    alpha = _check_alpha(params)
    rho, d1, d2 = matern_derivatives(params, float(t1) - float(t2))
    if alpha == 1:
        return np.array([[float(rho)]])
    return np.array([[float(rho), float(d1)], [-float(d1), -float(d2)]])


def stationary_cross_cov(params: ModelParams, s: ArrayLike, t: ArrayLike) -> np.ndarray:
    """Covariance between stacked X(s_i) and X(t_j); shape (alpha len(s), alpha len(t)).

    Rows are ordered [X(s_0), X(s_1), ...] with X = u (alpha = 1) or (u, u') (alpha = 2).
    """
    alpha = _check_alpha(params)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    rho, d1, d2 = matern_derivatives(params, s[:, None] - t[None, :])
    if alpha == 1:
        return rho
    out = np.empty((2 * s.size, 2 * t.size))
    out[0::2, 0::2] = rho
    out[0::2, 1::2] = -d1
    out[1::2, 0::2] = d1
    out[1::2, 1::2] = -d2
    return out

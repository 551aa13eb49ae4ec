"""Edge-level kernels: endpoint covariance, bridge covariance, boundary weights S_e and the
boundaryless covariance whose Kirchhoff-conditioned copies rebuild the graph field."""

import numpy as np
from numpy.typing import ArrayLike
from scipy.linalg import LinAlgError, block_diag, cho_factor, cho_solve

from graph_matern.core.exceptions import InvalidParameterError, SingularSystemError
from graph_matern.kernels.matern import matern_cov, stationary_cross_cov
from graph_matern.models.params import ModelParams


def _check_length(length: float) -> float:
    length = float(length)
    if not np.isfinite(length) or length <= 0:
        raise InvalidParameterError(f"edge length must be positive, got {length}", field="length")
    return length


def _check_points(t: ArrayLike, length: float) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    tol = 1e-12 * length
    if np.any(t < -tol) or np.any(t > length + tol):
        raise InvalidParameterError(f"points must lie in [0, {length}]", field="t")
    return np.clip(t, 0.0, length)


def endpoint_covariance(params: ModelParams, length: float) -> np.ndarray:
    """Stationary covariance of [X(0), X(length)]; 2 alpha x 2 alpha."""
    ends = np.array([0.0, _check_length(length)])
    return stationary_cross_cov(params, ends, ends)


def _endpoint_factor(params: ModelParams, length: float):
    try:
        return cho_factor(endpoint_covariance(params, length), lower=True)
    except LinAlgError as e:
        raise SingularSystemError("endpoint covariance", str(e)) from e


def bridge_cov(
    params: ModelParams, length: float, t1: ArrayLike, t2: ArrayLike
) -> np.ndarray | float:
    """Covariance of the stationary field on [0, length] conditioned on zero endpoint values
    (and derivatives when alpha = 2)."""
    length = _check_length(length)
    a, b = _check_points(t1, length), _check_points(t2, length)
    ends = np.array([0.0, length])
    alpha = params.alpha
    factor = _endpoint_factor(params, length)
    ca = stationary_cross_cov(params, ends, a)[:, ::alpha]
    cb = stationary_cross_cov(params, ends, b)[:, ::alpha]
    cov = np.asarray(matern_cov(params, a[:, None] - b[None, :])) - ca.T @ cho_solve(factor, cb)
    if np.ndim(t1) == 0 and np.ndim(t2) == 0:
        return float(cov[0, 0])
    return cov


def boundary_weights_S(
    params: ModelParams, length: float, t: ArrayLike, derivative: bool = False
) -> np.ndarray:
    """Weights S_e(t) mapping endpoint values [X(0), X(length)] to the conditional mean of u(t).

    With ``derivative`` the weights for u'(t) are returned instead (alpha = 2).
    Shape (2 alpha,) for scalar t, else (len(t), 2 alpha).
    """
    length = _check_length(length)
    points = _check_points(t, length)
    if derivative and params.alpha < 2:
        raise InvalidParameterError("derivative weights need alpha = 2", field="alpha")
    ends = np.array([0.0, length])
    column = 1 if derivative else 0
    cross = stationary_cross_cov(params, ends, points)[:, column :: params.alpha]
    weights = cho_solve(_endpoint_factor(params, length), cross).T
    return weights[0] if np.ndim(t) == 0 else weights


def boundaryless_cov(params: ModelParams, length: float, t1: float, t2: float) -> np.ndarray:
    """alpha x alpha covariance of the boundaryless edge process between X(t1) and X(t2).

    Adds to the stationary covariance a correction through the endpoints with middle
    matrix N = 2 blockdiag(C(0,0), C(l,l)) - C_ends.
    """
    length = _check_length(length)
    s, t = _check_points(t1, length), _check_points(t2, length)
    ends = np.array([0.0, length])
    m = endpoint_covariance(params, length)
    alpha = params.alpha
    middle = 2.0 * block_diag(m[:alpha, :alpha], m[alpha:, alpha:]) - m
    try:
        middle_factor = cho_factor(middle, lower=True)
    except LinAlgError as e:
        raise SingularSystemError("boundaryless middle matrix", str(e)) from e
    left = stationary_cross_cov(params, s, ends)
    right = stationary_cross_cov(params, ends, t)
    return stationary_cross_cov(params, s, t) + left @ cho_solve(middle_factor, right)


def boundaryless_endpoint_covariance(params: ModelParams, length: float) -> np.ndarray:
    """Covariance of [X(0), X(length)] under the boundaryless process."""
    alpha = params.alpha
    out = np.empty((2 * alpha, 2 * alpha))
    points = (0.0, float(length))
    for i, a in enumerate(points):
        for j, b in enumerate(points):
            out[i * alpha : (i + 1) * alpha, j * alpha : (j + 1) * alpha] = boundaryless_cov(
                params, length, a, b
            )
    return out


__all__ = [
    "boundary_weights_S",
    "boundaryless_cov",
    "boundaryless_endpoint_covariance",
    "bridge_cov",
    "endpoint_covariance",
]

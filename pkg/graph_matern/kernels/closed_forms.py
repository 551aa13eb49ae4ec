"""Closed-form covariances of the graph field on an interval (two degree-1 vertices with
Kirchhoff conditions) and on a circle (one loop).

Both are periodised image sums of the stationary kernel. The geometric series are summed
analytically; every exponent is non-positive, so large kappa * length cannot overflow.
"""

import numpy as np
from numpy.typing import ArrayLike

from graph_matern.kernels.edge import _check_length
from graph_matern.kernels.matern import _check_alpha, marginal_variance
from graph_matern.models.params import ModelParams


def periodized_cov(params: ModelParams, x: ArrayLike, period: float) -> np.ndarray:
    """sum_n rho(x + n * period) for 0 <= x <= period."""
    alpha = _check_alpha(params)
    x = np.asarray(x, dtype=float)
    kappa, c = params.kappa, marginal_variance(params)
    one_minus_q = -np.expm1(-kappa * period)
    near = np.exp(-kappa * x)
    far = np.exp(kappa * (x - period))
    if alpha == 1:
        return c * (near + far) / one_minus_q
    kx, kl = kappa * x, kappa * period
    forward = near * ((1.0 + kx) / one_minus_q + kl * np.exp(-kl) / one_minus_q**2)
    backward = far * ((1.0 - kx) / one_minus_q + kl / one_minus_q**2)
    return c * (forward + backward)


def interval_cov(params: ModelParams, length: float, t1: ArrayLike, t2: ArrayLike) -> np.ndarray | float:
    """Covariance on an interval [0, length] whose ends are degree-1 Kirchhoff vertices."""
    length = _check_length(length)
    a = np.clip(np.asarray(t1, dtype=float), 0.0, length)
    b = np.clip(np.asarray(t2, dtype=float), 0.0, length)
    period = 2.0 * length
    values = periodized_cov(params, np.abs(a - b), period) + periodized_cov(params, a + b, period)
    return values if np.ndim(values) else float(values)


def circle_cov(params: ModelParams, length: float, t1: ArrayLike, t2: ArrayLike) -> np.ndarray | float:
    """Covariance on a circle of circumference `length`; depends on t1 - t2 modulo length."""
    length = _check_length(length)
    lag = np.mod(np.asarray(t1, dtype=float) - np.asarray(t2, dtype=float), length)
    values = periodized_cov(params, lag, length)
    return values if np.ndim(values) else float(values)

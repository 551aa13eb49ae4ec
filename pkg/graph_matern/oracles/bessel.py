"""General Matérn covariance through the modified Bessel function of the second kind."""

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import gamma, kv

from graph_matern.models.params import ModelParams


def bessel_matern_cov(params: ModelParams, h: ArrayLike) -> np.ndarray | float:
    """sigma^2 2^(1-nu) / Gamma(nu) (kappa |h|)^nu K_nu(kappa |h|) with the stationary variance
    sigma^2 = Gamma(nu) / (tau^2 Gamma(alpha) sqrt(4 pi) kappa^(2 nu))."""
    nu = params.nu
    variance = gamma(nu) / (params.tau**2 * gamma(params.alpha) * np.sqrt(4.0 * np.pi) * params.kappa ** (2.0 * nu))
    x = params.kappa * np.abs(np.asarray(h, dtype=float))
    with np.errstate(invalid="ignore"):
        values = variance * 2.0 ** (1.0 - nu) / gamma(nu) * x**nu * kv(nu, x)
    values = np.where(x == 0, variance, values)
    return values if values.ndim else float(values)

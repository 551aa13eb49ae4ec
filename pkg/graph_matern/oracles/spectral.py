"""Truncated eigen-expansions of the covariance on an interval (Neumann) and on a circle.

Test-time references for the closed forms; the series converge like n_terms^(1 - 2 alpha).
"""

import numpy as np
from numpy.typing import ArrayLike

from graph_matern.core.exceptions import InvalidParameterError
from graph_matern.models.params import ModelParams

CHUNK = 100_000


def _check_terms(n_terms: int) -> None:
    if n_terms < 1:
        raise InvalidParameterError(f"n_terms must be at least 1, got {n_terms}", field="n_terms", value=n_terms)


def _series(params: ModelParams, eigenvalues, basis_product, n_terms: int, shape) -> np.ndarray:
    total = np.zeros(shape)
    for start in range(1, n_terms, CHUNK):
        i = np.arange(start, min(start + CHUNK, n_terms), dtype=float)
        weights = (params.kappa**2 + eigenvalues(i)) ** (-params.alpha)
        total += np.tensordot(basis_product(i), weights, axes=([-1], [0]))
    return total


def spectral_interval_cov(
    params: ModelParams, length: float, t1: ArrayLike, t2: ArrayLike, n_terms: int
) -> np.ndarray | float:
    """tau^-2 sum_i (kappa^2 + (i pi / l)^2)^-alpha phi_i(t1) phi_i(t2) with cosine eigenfunctions."""
    _check_terms(n_terms)
    a, b = np.broadcast_arrays(np.asarray(t1, dtype=float), np.asarray(t2, dtype=float))
    constant = params.kappa ** (-2 * params.alpha) / length

    def eigenvalues(i):
        return (i * np.pi / length) ** 2

    def basis_product(i):
        w = i * np.pi / length
        return (2.0 / length) * np.cos(a[..., None] * w) * np.cos(b[..., None] * w)

    total = (constant + _series(params, eigenvalues, basis_product, n_terms, a.shape)) / params.tau**2
    return total if total.ndim else float(total)


def spectral_circle_cov(
    params: ModelParams, length: float, t1: ArrayLike, t2: ArrayLike, n_terms: int
) -> np.ndarray | float:
    """Same expansion with the circle eigenpairs (2 pi k / l)^2, cosine and sine pairs."""
    _check_terms(n_terms)
    a, b = np.broadcast_arrays(np.asarray(t1, dtype=float), np.asarray(t2, dtype=float))
    lag = a - b
    constant = params.kappa ** (-2 * params.alpha) / length

    def eigenvalues(k):
        return (2.0 * np.pi * k / length) ** 2

    def basis_product(k):
        return (2.0 / length) * np.cos(lag[..., None] * (2.0 * np.pi * k / length))

    total = (constant + _series(params, eigenvalues, basis_product, n_terms, lag.shape)) / params.tau**2
    return total if total.ndim else float(total)

from graph_matern.oracles.bessel import bessel_matern_cov
from graph_matern.oracles.dense import DenseOracleResult, dense_constrained_oracle
from graph_matern.oracles.finite_difference import MeshCovariance, fd_graph_cov
from graph_matern.oracles.spectral import spectral_circle_cov, spectral_interval_cov

__all__ = [
    "DenseOracleResult",
    "MeshCovariance",
    "bessel_matern_cov",
    "dense_constrained_oracle",
    "fd_graph_cov",
    "spectral_circle_cov",
    "spectral_interval_cov",
]

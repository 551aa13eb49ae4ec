from graph_matern.kernels.closed_forms import circle_cov, interval_cov, periodized_cov
from graph_matern.kernels.edge import (
    boundary_weights_S,
    boundaryless_cov,
    boundaryless_endpoint_covariance,
    bridge_cov,
    endpoint_covariance,
)
from graph_matern.kernels.matern import (
    deriv_kernel_matrix,
    marginal_variance,
    matern_cov,
    matern_derivatives,
    stationary_cross_cov,
)

__all__ = [
    "boundary_weights_S",
    "boundaryless_cov",
    "boundaryless_endpoint_covariance",
    "bridge_cov",
    "circle_cov",
    "deriv_kernel_matrix",
    "endpoint_covariance",
    "interval_cov",
    "marginal_variance",
    "matern_cov",
    "matern_derivatives",
    "periodized_cov",
    "stationary_cross_cov",
]

from graph_matern.inference.constrained import (
    ConstrainedGaussian,
    ConstrainedPosterior,
    build_model,
    condition_on_vertices,
    constrained_covariance,
    density_y_given_constraints,
    posterior_u,
    prior_posterior,
    sample_constrained,
)
from graph_matern.inference.covariance import BlockDiagonalCovariance
from graph_matern.inference.kriging import krig, krig_alpha1, krig_alphaN, variance_map
from graph_matern.inference.likelihood import (
    METHODS,
    loglik,
    loglik_alpha1_bridge,
    loglik_alpha1_extended,
    loglik_alphaN,
    loglik_dense,
)
from graph_matern.inference.observations import ObservationSet
from graph_matern.inference.simulation import simulate_field, simulate_observations

__all__ = [
    "METHODS",
    "BlockDiagonalCovariance",
    "ConstrainedGaussian",
    "ConstrainedPosterior",
    "ObservationSet",
    "build_model",
    "condition_on_vertices",
    "constrained_covariance",
    "density_y_given_constraints",
    "krig",
    "krig_alpha1",
    "krig_alphaN",
    "loglik",
    "loglik_alpha1_bridge",
    "loglik_alpha1_extended",
    "loglik_alphaN",
    "loglik_dense",
    "posterior_u",
    "prior_posterior",
    "sample_constrained",
    "simulate_field",
    "simulate_observations",
    "variance_map",
]

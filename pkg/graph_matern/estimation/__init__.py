from graph_matern.estimation.cross_validation import cross_validate, fold_assignment
from graph_matern.estimation.experiments import (
    consistency_experiment,
    kriging_misspec_experiment,
    kriging_mse_ratios,
)
from graph_matern.estimation.mle import fit_mle, fit_profile_mle, profile_curve, profile_point
from graph_matern.estimation.scoring import (
    crps_gaussian,
    expected_abs_error,
    log_score,
    scores,
    scrps_gaussian,
)

__all__ = [
    "consistency_experiment",
    "cross_validate",
    "crps_gaussian",
    "expected_abs_error",
    "fit_mle",
    "fit_profile_mle",
    "fold_assignment",
    "kriging_misspec_experiment",
    "kriging_mse_ratios",
    "log_score",
    "profile_curve",
    "profile_point",
    "scores",
    "scrps_gaussian",
]

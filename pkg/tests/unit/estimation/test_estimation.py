"""Unit tests for likelihood fitting, cross-validation and the estimation experiments."""

import math
from types import SimpleNamespace

import numpy as np
import pytest

from graph_matern.core.exceptions import InvalidObservationError, InvalidParameterError
from graph_matern.estimation import cross_validation
from graph_matern.estimation.cross_validation import average_folds, cross_validate, fold_assignment
from graph_matern.estimation.experiments import (
    consistency_experiment,
    kriging_misspec_experiment,
    kriging_mse_ratios,
)
from graph_matern.estimation.mle import fit_mle, fit_profile_mle, profile_curve, profile_point
from graph_matern.graph.metric_graph import Location
from graph_matern.inference.likelihood import loglik
from graph_matern.models.params import CandidateModel, ModelParams
from graph_matern.models.results import ScoreSummary
from tests.utilities import ObservationFactory

pytestmark = [pytest.mark.unit]


@pytest.fixture
def direct_params():
    return ModelParams(alpha=1, kappa=2.0, tau=1.5)


class TestProfileLikelihood:
    """Test the tau-profiled likelihood for direct observations."""

    def test_profile_point_matches_direct_evaluation(self, star, direct_params):
        """Should report the log-likelihood at the profiled tau^2."""
        obs = ObservationFactory.simulate(star, direct_params, 20, seed=4)
        point = profile_point(star, obs, 1, 2.0)
        at_optimum = loglik(star, direct_params.with_values(tau=math.sqrt(point.tau2)), obs)
        assert point.loglik == pytest.approx(at_optimum, abs=1e-8)

    def test_profile_point_is_maximum_in_tau(self, star, direct_params):
        """Should not be beaten by nearby tau values."""
        obs = ObservationFactory.simulate(star, direct_params, 20, seed=5)
        point = profile_point(star, obs, 1, 2.0)
        for factor in (0.9, 1.1):
            tau = math.sqrt(point.tau2 * factor)
            assert loglik(star, direct_params.with_values(tau=tau), obs) < point.loglik

    def test_profile_curve(self, star, direct_params):
        """Should give one point per kappa."""
        obs = ObservationFactory.simulate(star, direct_params, 15, seed=6)
        curve = profile_curve(star, obs, 1, [0.5, 1.0, 2.0])
        assert [p.kappa for p in curve] == [0.5, 1.0, 2.0]
        assert all(p.tau2 > 0 for p in curve)

    def test_fit_profile_mle(self, star, direct_params):
        """Should find a profile optimum at least as good as a coarse grid."""
        obs = ObservationFactory.simulate(star, direct_params, 30, seed=7)
        fit = fit_profile_mle(star, obs, 1, (0.1, 20.0))
        grid = profile_curve(star, obs, 1, np.geomspace(0.1, 20.0, 9))
        assert fit.converged
        assert fit.params.sigma == 0.0
        assert fit.loglik >= max(p.loglik for p in grid) - 1e-6
        assert fit.profile


class TestFitMle:
    """Test the Nelder-Mead likelihood fit."""

    def test_fit_beats_truth(self, star, params1):
        """Should reach a likelihood at least as high as at the true parameters."""
        obs = ObservationFactory.simulate(star, params1, 40, seed=8)
        fit = fit_mle(star, obs, 1, (0.05, 20.0))
        assert fit.params.alpha == 1
        assert fit.loglik >= loglik(star, params1, obs) - 1e-6
        assert fit.loglik == pytest.approx(loglik(star, fit.params, obs), abs=1e-8)
        assert fit.evaluations > 0

    def test_pinned_sigma(self, star, direct_params):
        """Should keep a pinned noise level."""
        obs = ObservationFactory.simulate(star, direct_params, 20, seed=9)
        fit = fit_mle(star, obs, 1, (0.05, 20.0), sigma=0.0)
        assert fit.params.sigma == 0.0

    def test_fit_row(self, star, params1):
        """Should flatten into a table row."""
        obs = ObservationFactory.simulate(star, params1, 20, seed=10)
        row = fit_mle(star, obs, 1, (0.05, 20.0), starts=1).to_row()
        assert row.alpha == 1
        assert row.method == "nelder-mead"

    def test_too_few_observations(self, star, params1):
        """Should need at least three observations."""
        obs = ObservationFactory.simulate(star, params1, 2)
        with pytest.raises(InvalidObservationError, match="at least 3"):
            fit_mle(star, obs, 1)

    @pytest.mark.parametrize("bounds", [(0.0, 1.0), (2.0, 1.0), (1.0, math.inf)])
    def test_bad_bounds(self, star, params1, bounds):
        """Should reject invalid kappa bounds."""
        obs = ObservationFactory.simulate(star, params1, 5)
        with pytest.raises(InvalidParameterError, match="kappa bounds"):
            fit_mle(star, obs, 1, bounds)


class TestCrossValidation:
    """Test fold assignment and fold-averaged cross-validation."""

    def test_fold_sizes_balanced(self):
        """Should split n points into folds differing by at most one."""
        labels = fold_assignment(23, 5, seed=1)
        counts = np.bincount(labels)
        assert counts.sum() == 23
        assert counts.max() - counts.min() <= 1

    def test_fold_assignment_seeded(self):
        """Should repeat for equal seeds."""
        assert np.array_equal(fold_assignment(10, 3, seed=2), fold_assignment(10, 3, seed=2))

    def test_too_few_folds(self):
        """Should need at least two folds."""
        with pytest.raises(InvalidParameterError):
            fold_assignment(10, 1)

    def test_fold_leaves_too_little_training_data(self, star, params1):
        """Should reject folds that leave fewer than three training points."""
        obs = ObservationFactory.simulate(star, params1, 4)
        with pytest.raises(InvalidObservationError, match="fewer than 3 training"):
            cross_validate(star, obs, [CandidateModel(name="alpha=1", alpha=1)], folds=2)

    def test_more_folds_than_observations(self, star, params1):
        """Should reject a fold count that leaves a fold empty."""
        obs = ObservationFactory.simulate(star, params1, 4)
        with pytest.raises(InvalidObservationError, match="cannot fill"):
            cross_validate(star, obs, [CandidateModel(name="alpha=1", alpha=1)], folds=5)

    def test_average_folds(self):
        """Should weight every fold equally."""
        summaries = [
            ScoreSummary(rmse=1.0, mae=1.0, ls=0.0, crps=0.5, scrps=0.1),
            ScoreSummary(rmse=3.0, mae=2.0, ls=2.0, crps=1.5, scrps=0.3),
        ]
        average = average_folds(summaries)
        assert average.rmse == pytest.approx(2.0)
        assert average.mae == pytest.approx(1.5)
        assert average.ls == pytest.approx(1.0)
        assert average.crps == pytest.approx(1.0)
        assert average.scrps == pytest.approx(0.2)

    def test_scores_are_fold_averages(self, star, params1, monkeypatch):
        """Should average per-fold scores rather than pool held-out points across unequal folds."""
        obs = ObservationFactory.simulate(star, params1, 7, seed=3)

        def score_by_fold_size(graph, obs, model, held_out, kappa_bounds):
            size = float(np.count_nonzero(held_out))
            return ScoreSummary(rmse=size, mae=size, ls=size, crps=size, scrps=size)

        monkeypatch.setattr(cross_validation, "_score_fold", score_by_fold_size)
        monkeypatch.setattr(cross_validation, "fit_mle", lambda *args, **kwargs: SimpleNamespace(loglik=-2.0))
        (row,) = cross_validate(star, obs, [CandidateModel(name="alpha=1", alpha=1)], folds=2, seed=0)
        # folds of 4 and 3 points; pooling would weight them 4:3
        assert row.crps == pytest.approx(3.5)
        assert row.negloglik == pytest.approx(2.0)

    @pytest.mark.slow
    def test_cross_validate_rows(self, star, params1):
        """Should give one row of finite scores per candidate."""
        obs = ObservationFactory.simulate(star, params1, 24, seed=12)
        models = [CandidateModel(name="alpha=1", alpha=1), CandidateModel(name="alpha=2", alpha=2)]
        rows = cross_validate(star, obs, models, folds=3, seed=1, kappa_bounds=(0.1, 20.0))
        assert [row.model for row in rows] == ["alpha=1", "alpha=2"]
        for row in rows:
            assert math.isfinite(row.crps)
            assert row.rmse > 0


class TestExperiments:
    """Test the consistency and misspecification experiments."""

    def test_ratio_is_one_for_true_model(self, star, params1):
        """Should give unit MSE ratios when the working model is the truth."""
        targets = [Location("arm0", 0.33), Location("arm2", 1.1)]
        ratios = kriging_mse_ratios(star, params1, params1, 10, targets)
        assert ratios == pytest.approx(np.ones(2), abs=1e-10)

    def test_ratio_at_least_one(self, star, params1):
        """Should never beat the true-model predictor."""
        working = params1.with_values(kappa=4.0, tau=0.5)
        targets = [Location("arm0", 0.33), Location("arm1", 0.1), Location("arm2", 1.1)]
        ratios = kriging_mse_ratios(star, params1, working, 12, targets)
        assert np.all(ratios >= 1.0 - 1e-10)

    def test_misspec_experiment_rows(self, star, params1):
        """Should give one row per design size."""
        working = params1.with_values(kappa=0.7)
        rows = kriging_misspec_experiment(star, params1, working, [5, 10], n_targets=6, seed=1)
        assert [row.n for row in rows] == [5, 10]
        assert all(row.max_ratio >= row.mean_ratio >= 1.0 - 1e-10 for row in rows)

    def test_consistency_needs_replicates(self, star, direct_params):
        """Should need at least two replicates."""
        with pytest.raises(InvalidParameterError):
            consistency_experiment(star, direct_params, [10], replicates=1)

    @pytest.mark.slow
    def test_consistency_rows(self, star, direct_params):
        """Should summarize the tau^2 estimates per design size."""
        rows = consistency_experiment(star, direct_params, [15, 30], replicates=3, seed=1, kappa_bounds=(0.2, 10.0))
        assert [row.n for row in rows] == [15, 30]
        for row in rows:
            assert row.reference == pytest.approx(math.sqrt(2.0) * direct_params.tau**2)
            assert row.mean_tau2 > 0
            assert row.bias == pytest.approx(row.mean_tau2 - direct_params.tau**2)

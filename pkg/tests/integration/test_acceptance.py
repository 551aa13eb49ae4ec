"""End-to-end accuracy, consistency and timing checks on random graphs.

These run the library the way an analysis would and are marked slow; select them with ``-m slow``.
"""

import math

import numpy as np
import pytest

from graph_matern.core.settings import settings
from graph_matern.estimation.cross_validation import cross_validate
from graph_matern.estimation.experiments import consistency_experiment, kriging_misspec_experiment
from graph_matern.graph.metric_graph import Location
from graph_matern.inference.constrained import build_model, sample_constrained
from graph_matern.inference.kriging import krig
from graph_matern.inference.likelihood import (
    loglik_alpha1_bridge,
    loglik_alpha1_extended,
    loglik_alphaN,
    loglik_dense,
)
from graph_matern.kernels.closed_forms import circle_cov, interval_cov
from graph_matern.models.params import CandidateModel, ModelParams
from graph_matern.oracles.spectral import spectral_circle_cov, spectral_interval_cov
from graph_matern.services.benchmark_service import BenchmarkService, lattice_graph
from tests.utilities import GraphFactory, ObservationFactory, dense_reference

pytestmark = [pytest.mark.integration, pytest.mark.slow]

GRAPH_SEEDS = range(20)


def random_graph(seed, loops):
    rng = np.random.default_rng(1000 + seed)
    n_vertices = int(rng.integers(3, 13))
    n_edges = int(rng.integers(n_vertices, 19))
    return GraphFactory.random(rng, n_vertices, n_edges, loops=loops)


@pytest.mark.oracle
class TestClosedFormsAgainstSpectral:
    """Test the interval and circle covariances on a 5 x 5 grid of location pairs."""

    GRID = np.linspace(0.0, 1.0, 5)

    @pytest.mark.parametrize(("alpha", "n_terms"), [(1, 1_000_000), (2, 10_000)])
    def test_interval(self, alpha, n_terms):
        """Should agree with the cosine expansion to 1e-6."""
        params = ModelParams(alpha=alpha, kappa=2.0, tau=1.0)
        t1, t2 = self.GRID[:, None], self.GRID[None, :]
        series = spectral_interval_cov(params, 1.0, t1, t2, n_terms)
        assert np.max(np.abs(series - interval_cov(params, 1.0, t1, t2))) < 1e-6

    @pytest.mark.parametrize(("alpha", "n_terms"), [(1, 1_000_000), (2, 10_000)])
    def test_circle(self, alpha, n_terms):
        """Should agree with the Fourier expansion to 1e-6."""
        params = ModelParams(alpha=alpha, kappa=2.0, tau=1.0)
        t1, t2 = self.GRID[:, None], self.GRID[None, :]
        series = spectral_circle_cov(params, 1.0, t1, t2, n_terms)
        assert np.max(np.abs(series - circle_cov(params, 1.0, t1, t2))) < 1e-6


@pytest.mark.oracle
class TestRandomGraphs:
    """Test the sparse evaluators against dense conditioning on 20 random graphs."""

    @pytest.mark.parametrize("seed", GRAPH_SEEDS)
    def test_alpha1_likelihoods(self, seed):
        """Should give the same log-likelihood through every alpha = 1 path."""
        graph = random_graph(seed, loops=True)
        params = ModelParams(alpha=1, kappa=1.5, tau=0.8, sigma=0.3)
        obs = ObservationFactory.simulate(graph, params, 50, seed=seed)
        dense = loglik_dense(graph, params, obs)
        assert loglik_alpha1_extended(graph, params, obs) == pytest.approx(dense, abs=1e-8)
        assert loglik_alpha1_bridge(graph, params, obs) == pytest.approx(dense, abs=1e-8)

    @pytest.mark.parametrize("seed", GRAPH_SEEDS)
    def test_alpha2_likelihood(self, seed):
        """Should give the dense log-likelihood through the constrained model."""
        graph = random_graph(seed, loops=False)
        params = ModelParams(alpha=2, kappa=1.5, tau=0.8, sigma=0.3)
        obs = ObservationFactory.simulate(graph, params, 50, seed=seed)
        assert loglik_alphaN(graph, params, obs) == pytest.approx(loglik_dense(graph, params, obs), abs=1e-8)

    @pytest.mark.parametrize("alpha", [1, 2])
    @pytest.mark.parametrize("seed", GRAPH_SEEDS[:5])
    def test_kriging(self, alpha, seed):
        """Should reproduce the dense posterior mean and variance at held-out targets."""
        graph = random_graph(seed, loops=alpha == 1)
        params = ModelParams(alpha=alpha, kappa=1.2, tau=0.9, sigma=0.2)
        obs = ObservationFactory.simulate(graph, params, 50, seed=seed)
        targets = [Location(edge.id, 0.3 * edge.length) for edge in graph.edges[:5]]
        reference, model, _, wanted = dense_reference(graph, params, obs, targets)
        selector = model.constraints.A.toarray()[wanted]

        predictions = krig(graph, params, obs, targets)
        assert [p.mean for p in predictions] == pytest.approx(selector @ reference.mean, abs=1e-8)
        expected_var = np.diag(selector @ reference.covariance @ selector.T)
        assert [p.var for p in predictions] == pytest.approx(expected_var, abs=1e-8)

    @pytest.mark.parametrize("seed", GRAPH_SEEDS)
    def test_samples_satisfy_constraints(self, seed):
        """Should draw alpha = 2 samples that satisfy the vertex conditions to 1e-10."""
        graph = random_graph(seed, loops=False)
        model = build_model(graph, ModelParams(alpha=2, kappa=1.5, tau=0.8))
        _, samples = sample_constrained(model, np.random.default_rng(seed), n_samples=10)
        residual = samples @ model.constraints.K.toarray().T
        assert np.max(np.abs(residual)) < 1e-10


class TestConsistency:
    """Test the tau^2 estimator on an interval with direct observations."""

    def test_tau2_estimator(self, monkeypatch):
        """Should shrink |bias| along the n-grid and approach sqrt(2) tau^2 / sqrt(n) spread."""
        monkeypatch.setattr(settings, "NUM_THREADS", 4)
        params = ModelParams(alpha=1, kappa=2.0, tau=1.0)
        rows = consistency_experiment(
            GraphFactory.interval(1.0), params, [100, 400, 1600], replicates=200, seed=7, kappa_bounds=(0.2, 20.0)
        )
        biases = [abs(row.bias) for row in rows]
        assert biases[0] > biases[1] > biases[2]
        largest = rows[-1]
        assert largest.sd_sqrt_n == pytest.approx(largest.reference, rel=0.25)
        assert abs(largest.bias) < 3.0 * largest.sd / math.sqrt(largest.replicates)


class TestMisspecification:
    """Test exact kriging efficiency under a wrong working model."""

    def test_wrong_range_is_asymptotically_efficient(self):
        """Should bring the largest MSE ratio down towards 1 when only kappa is wrong."""
        truth = ModelParams(alpha=1, kappa=2.0, tau=1.0)
        working = truth.with_values(kappa=4.0)
        rows = kriging_misspec_experiment(GraphFactory.star((1.0, 1.0, 1.0)), truth, working, [25, 100, 400], seed=5)
        maxima = [row.max_ratio for row in rows]
        assert maxima[0] > maxima[1] > maxima[2]
        assert all(row.max_ratio >= 1.0 - 1e-9 for row in rows)
        assert maxima[-1] < 1.05

    def test_wrong_smoothness_stays_inefficient(self):
        """Should keep a clear MSE penalty when alpha is wrong."""
        truth = ModelParams(alpha=2, kappa=2.0, tau=1.0)
        working = ModelParams(alpha=1, kappa=2.0, tau=1.0)
        (row,) = kriging_misspec_experiment(GraphFactory.star((1.0, 1.0, 1.0)), truth, working, [400], seed=5)
        assert row.max_ratio > 1.05


class TestPerformance:
    """Test how the evaluators scale with the number of observations."""

    SIZES = (250, 500, 1000, 2000)

    @pytest.fixture(scope="class")
    def timings(self):
        params = ModelParams(alpha=1, kappa=2.0, tau=1.0, sigma=0.1)
        service = BenchmarkService(lattice_graph(5, 5, spacing=1.0, h=0.25), params, seed=3)
        rows = service.run(self.SIZES, repeats=3, methods=["dense", "extended", "bridge"])
        return {(row.method, row.n): row.median_seconds for row in rows}

    @pytest.mark.parametrize("method", ["extended", "bridge"])
    def test_sparse_growth_is_sub_cubic(self, timings, method):
        """Should grow more slowly than n^3 over n = 250 ... 2000."""
        seconds = [timings[(method, n)] for n in self.SIZES]
        slope = np.polyfit(np.log(self.SIZES), np.log(seconds), 1)[0]
        assert slope < 3.0

    def test_extended_beats_dense(self, timings):
        """Should be at least five times faster than dense at n = 2000."""
        assert timings[("dense", 2000)] >= 5.0 * timings[("extended", 2000)]


class TestModelSelection:
    """Test that cross-validation recognises the smoother model."""

    def test_alpha2_preferred_on_smooth_fields(self, monkeypatch):
        """Should rank alpha = 2 above alpha = 1 by CRPS for at least 16 of 20 seeds."""
        monkeypatch.setattr(settings, "NUM_THREADS", 5)
        monkeypatch.setattr(settings, "MLE_STARTS", 1)
        monkeypatch.setattr(settings, "MLE_XATOL", 1e-4)
        monkeypatch.setattr(settings, "MLE_FATOL", 1e-6)
        graph = GraphFactory.star((1.0, 1.0, 1.0))
        truth = ModelParams(alpha=2, kappa=2.0, tau=0.2, sigma=0.1)
        models = [CandidateModel(name="alpha=1", alpha=1), CandidateModel(name="alpha=2", alpha=2)]
        wins = 0
        for seed in range(20):
            obs = ObservationFactory.simulate(graph, truth, 60, seed=seed)
            rows = {
                row.model: row
                for row in cross_validate(graph, obs, models, folds=5, seed=seed, kappa_bounds=(0.2, 20.0))
            }
            wins += rows["alpha=2"].crps < rows["alpha=1"].crps
        assert wins >= 16

"""Unit tests for kriging, simulation and the constrained model."""

import numpy as np
import pytest

from graph_matern.core.exceptions import (
    InvalidObservationError,
    InvalidParameterError,
    NotPositiveDefiniteError,
)
from graph_matern.graph.metric_graph import Location
from graph_matern.inference.constrained import (
    build_model,
    constrained_covariance,
    density_y_given_constraints,
    posterior_u,
    prior_posterior,
    sample_constrained,
)
from graph_matern.inference.covariance import BlockDiagonalCovariance
from graph_matern.inference.kriging import krig, krig_alpha1, krig_alphaN, variance_map
from graph_matern.inference.likelihood import location_covariance
from graph_matern.inference.observations import ObservationSet
from graph_matern.inference.simulation import simulate_field, simulate_observations
from graph_matern.kernels.closed_forms import circle_cov, interval_cov
from graph_matern.models.params import ModelParams
from graph_matern.oracles.dense import dense_constrained_oracle
from tests.utilities import GraphFactory, ObservationFactory, dense_reference

pytestmark = [pytest.mark.unit]

TARGETS = [Location("tail", 0.35), Location("loop", 0.9), Location("p1", 0.0), Location("p2", 0.45)]


class TestKriging:
    """Test posterior means and variances at target locations."""

    @pytest.mark.parametrize("alpha", [1, 2])
    def test_matches_dense_oracle(self, alpha):
        """Should agree with dense conditioning on the extended graph."""
        graph = GraphFactory.tadpole()
        params = ModelParams(alpha=alpha, kappa=1.3, tau=0.7, sigma=0.25)
        obs = ObservationFactory.simulate(graph, params, 10, seed=11)
        reference, model, _, wanted = dense_reference(graph, params, obs, TARGETS)
        selector = model.constraints.A.toarray()[wanted]

        predictions = krig(graph, params, obs, TARGETS)
        assert [p.mean for p in predictions] == pytest.approx(selector @ reference.mean, abs=1e-8)
        expected_var = np.diag(selector @ reference.covariance @ selector.T)
        assert [p.var for p in predictions] == pytest.approx(expected_var, abs=1e-8)

    def test_alpha1_paths_agree(self, params1):
        """Should give the same answer through the vertex precision and the constrained model."""
        graph = GraphFactory.tadpole()
        obs = ObservationFactory.simulate(graph, params1, 15, seed=3)
        direct = krig_alpha1(graph, params1, obs, TARGETS)
        constrained = krig_alphaN(graph, params1, obs, TARGETS)
        for a, b in zip(direct, constrained, strict=True):
            assert a.mean == pytest.approx(b.mean, abs=1e-8)
            assert a.var == pytest.approx(b.var, abs=1e-8)

    def test_predictive_adds_noise(self, star, params2):
        """Should add sigma^2 to the latent variance for predictive output."""
        obs = ObservationFactory.simulate(star, params2, 8, seed=2)
        targets = [Location("arm0", 0.5)]
        latent = krig(star, params2, obs, targets)[0]
        predictive = krig(star, params2, obs, targets, predictive=True)[0]
        assert predictive.includes_noise
        assert predictive.mean == pytest.approx(latent.mean)
        assert predictive.var == pytest.approx(latent.var + params2.sigma**2)

    @pytest.mark.parametrize("alpha", [1, 2])
    def test_direct_observation_is_reproduced(self, alpha, star):
        """Should return (y, 0) at an exactly observed location."""
        params = ModelParams(alpha=alpha, kappa=1.0, tau=1.0)
        obs = ObservationSet((Location("arm0", 0.3), Location("arm2", 1.0)), np.array([0.7, -0.4]))
        prediction = krig(star, params, obs, [Location("arm0", 0.3), Location("arm1", 0.2)])
        assert prediction[0].mean == pytest.approx(0.7, abs=1e-10)
        assert prediction[0].var == pytest.approx(0.0, abs=1e-10)
        assert prediction[1].var > 0

    def test_posterior_variance_below_prior(self, interval, params1):
        """Should never exceed the prior variance."""
        obs = ObservationFactory.simulate(interval, params1, 5, seed=1)
        targets = [Location("e", t) for t in (0.0, 0.33, 0.8)]
        prior = np.diag(location_covariance(interval, params1, targets))
        posterior = [p.var for p in krig(interval, params1, obs, targets)]
        assert np.all(np.array(posterior) <= prior + 1e-12)

    def test_requires_targets(self, interval, params1):
        """Should reject an empty target list."""
        obs = ObservationFactory.simulate(interval, params1, 3)
        with pytest.raises(InvalidParameterError, match="no prediction targets"):
            krig(interval, params1, obs, [])

    def test_duplicate_direct_observations(self, interval):
        """Should reject repeated direct observations."""
        params = ModelParams(alpha=2, kappa=1.0, tau=1.0)
        obs = ObservationSet((Location("e", 0.5), Location("e", 0.5)), np.array([0.1, 0.2]))
        with pytest.raises(InvalidObservationError):
            krig(interval, params, obs, [Location("e", 0.2)])


class TestVarianceMap:
    """Test prior marginal variance maps."""

    @pytest.mark.parametrize("alpha", [1, 2])
    def test_interval(self, alpha, interval):
        """Should reproduce the closed-form interval variance."""
        params = ModelParams(alpha=alpha, kappa=1.1, tau=1.0)
        points = variance_map(interval, params, 8)
        ts = np.array([p.t for p in points])
        assert [p.var for p in points] == pytest.approx(interval_cov(params, 1.0, ts, ts), abs=1e-10)

    @pytest.mark.parametrize("alpha", [1, 2])
    def test_circle_is_flat(self, alpha, circle):
        """Should be constant on a circle."""
        params = ModelParams(alpha=alpha, kappa=0.9, tau=1.0)
        values = [p.var for p in variance_map(circle, params, 5)]
        assert values == pytest.approx([circle_cov(params, 2.0, 0.0, 0.0)] * len(values), abs=1e-10)

    def test_matches_location_covariance(self, star, params2):
        """Should equal the diagonal of the location covariance."""
        points = variance_map(star, params2, 4)
        locations = [Location(p.edge, p.t) for p in points if 0 < p.t]
        expected = np.diag(location_covariance(star, params2, locations))
        values = [p.var for p in points if 0 < p.t]
        assert values == pytest.approx(expected, abs=1e-10)


class TestConstrainedModel:
    """Test sampling and moments under the Kirchhoff constraints."""

    @pytest.mark.parametrize("alpha", [1, 2])
    def test_samples_satisfy_constraints(self, alpha):
        """Should draw vectors with K U = 0."""
        graph = GraphFactory.random(np.random.default_rng(4), 6, 9, loops=False)
        model = build_model(graph, ModelParams(alpha=alpha, kappa=1.0, tau=1.0))
        _, draws = sample_constrained(model, 0, n_samples=5)
        assert np.abs(model.constraints.K @ draws.T).max() < 1e-10

    def test_covariance_matches_dense_oracle(self):
        """Should equal textbook conditioning of N(0, Q^{-1}) on K U = 0."""
        graph = GraphFactory.parallel((1.0, 0.7, 1.4))
        model = build_model(graph, ModelParams(alpha=2, kappa=1.2, tau=0.8))
        n = model.n
        reference = dense_constrained_oracle(
            model.precision.matrix.toarray(),
            model.constraints.K.toarray(),
            np.zeros((0, n)),
            np.zeros((0, 0)),
            [],
        )
        assert np.allclose(constrained_covariance(model), reference.covariance, atol=1e-9)

    def test_prior_posterior_variances(self, star, params1):
        """Should give the diagonal of the constrained covariance."""
        model = build_model(star, params1)
        selector = model.constraints.A
        expected = np.diag(constrained_covariance(model, selector))
        assert prior_posterior(model).variances(selector) == pytest.approx(expected, abs=1e-12)

    def test_sample_covariance(self, interval):
        """Should reproduce the vertex covariance empirically."""
        params = ModelParams(alpha=1, kappa=1.0, tau=1.0)
        model = build_model(interval, params)
        values, _ = sample_constrained(model, 7, n_samples=100000)
        expected = interval_cov(params, 1.0, np.array([[0.0], [1.0]]), np.array([[0.0, 1.0]]))
        assert np.allclose(np.cov(values.T), expected, atol=0.05)

    def test_inhomogeneous_constraints_match_dense_oracle(self, star):
        """Should condition on K U = b with b != 0 and on noisy data like the dense reference."""
        model = build_model(star, ModelParams(alpha=2, kappa=1.1, tau=0.9))
        rng = np.random.default_rng(8)
        b = rng.standard_normal(model.constraints.k)
        design = model.constraints.A[[0, 2, 3]]
        y = np.array([0.4, -0.2, 1.1])
        noise = BlockDiagonalCovariance.diagonal(np.full(3, 0.1))
        reference = dense_constrained_oracle(
            model.precision.matrix.toarray(),
            model.constraints.K.toarray(),
            design.toarray(),
            0.1 * np.eye(3),
            y,
            b=b,
        )
        assert density_y_given_constraints(model, design, noise, y, b) == pytest.approx(reference.loglik, abs=1e-9)
        posterior = posterior_u(model, design, noise, y, b)
        assert np.allclose(posterior.mean, reference.mean, atol=1e-9)
        assert np.allclose(posterior.covariance(np.eye(model.n)), reference.covariance, atol=1e-9)


class TestSimulation:
    """Test simulation of the field and of observations."""

    def test_seeded_draws_repeat(self, star, params2):
        """Should give identical draws for identical seeds."""
        locations = [Location("arm0", 0.2), Location("arm1", 0.4), Location("arm2", 1.0)]
        first = simulate_field(star, params2, locations, seed=9)
        second = simulate_field(star, params2, locations, seed=9)
        assert first.shape == (3,)
        assert np.array_equal(first, second)
        assert not np.array_equal(first, simulate_field(star, params2, locations, seed=10))

    def test_many_samples_shape(self, circle, params2):
        """Should return one row per sample."""
        locations = [Location("c", t) for t in (0.0, 0.5, 1.5)]
        assert simulate_field(circle, params2, locations, seed=0, n_samples=4).shape == (4, 3)

    def test_rejects_non_positive_sample_count(self, circle, params1):
        """Should reject n_samples < 1."""
        with pytest.raises(InvalidParameterError):
            simulate_field(circle, params1, [Location("c", 0.5)], n_samples=0)

    def test_empirical_covariance(self, interval):
        """Should match the closed-form covariance empirically, bridges included."""
        params = ModelParams(alpha=1, kappa=1.0, tau=1.0)
        ts = np.array([0.0, 0.3, 0.7])
        draws = simulate_field(interval, params, [Location("e", t) for t in ts], seed=1, n_samples=100000)
        expected = interval_cov(params, 1.0, ts[:, None], ts[None, :])
        assert np.allclose(np.cov(draws.T), expected, atol=0.05)

    def test_coincident_locations_share_value(self, interval, params2):
        """Should give the same value at repeated locations."""
        values = simulate_field(interval, params2, [Location("e", 0.4), Location("e", 0.4)], seed=3)
        assert values[0] == values[1]

    def test_observations_add_noise(self):
        """Should add N(0, sigma^2) noise and keep exact values when sigma = 0."""
        locations = [Location("e", 0.5)] * 3
        values = np.array([1.0, 2.0, 3.0])
        assert np.array_equal(simulate_observations(locations, values, 0.0).values, values)
        noisy = simulate_observations(locations, values, 0.1, seed=0)
        assert not np.array_equal(noisy.values, values)

    def test_observations_reject_negative_sigma(self):
        """Should reject a negative noise level."""
        with pytest.raises(InvalidParameterError):
            simulate_observations([Location("e", 0.5)], np.array([0.0]), -1.0)


class TestObservationsAndNoise:
    """Test observation containers and block covariances."""

    def test_mismatched_lengths(self):
        """Should reject a different number of values and locations."""
        with pytest.raises(InvalidObservationError, match="2 locations but 1 values"):
            ObservationSet((Location("e", 0.1), Location("e", 0.2)), np.array([0.0]))

    def test_non_finite_values(self):
        """Should reject NaN values."""
        with pytest.raises(InvalidObservationError, match="finite"):
            ObservationSet.from_arrays(["e"], [0.1], [float("nan")])

    def test_subset(self):
        """Should keep the selected observations in order."""
        obs = ObservationSet.from_arrays(["a", "b", "c"], [0.1, 0.2, 0.3], [1.0, 2.0, 3.0])
        part = obs.subset([2, 0])
        assert part.n == 2
        assert [loc.edge for loc in part.locations] == ["c", "a"]
        assert list(part.values) == [3.0, 1.0]

    def test_block_covariance_solve_and_logdet(self):
        """Should solve and take determinants block by block."""
        block = np.array([[2.0, 0.5], [0.5, 1.0]])
        noise = BlockDiagonalCovariance(3, [(np.array([0, 2]), block), (np.array([1]), np.array([[4.0]]))])
        full = np.array([[2.0, 0.0, 0.5], [0.0, 4.0, 0.0], [0.5, 0.0, 1.0]])
        v = np.array([1.0, -2.0, 0.5])
        assert noise.solve(v) == pytest.approx(np.linalg.solve(full, v))
        assert noise.logdet() == pytest.approx(np.log(np.linalg.det(full)))

    def test_block_covariance_requires_cover(self):
        """Should reject observations without a block."""
        with pytest.raises(NotPositiveDefiniteError):
            BlockDiagonalCovariance(2, [(np.array([0]), np.array([[1.0]]))])

    def test_diagonal_rejects_zero_variance(self):
        """Should reject zero noise variances."""
        with pytest.raises(NotPositiveDefiniteError):
            BlockDiagonalCovariance.diagonal(np.array([1.0, 0.0]))

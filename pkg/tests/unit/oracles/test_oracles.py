"""Unit tests for the reference covariances used to check the exact code paths."""

import numpy as np
import pytest

from graph_matern.core.exceptions import InvalidParameterError, ResourceLimitError
from graph_matern.kernels.closed_forms import circle_cov, interval_cov
from graph_matern.models.params import ModelParams
from graph_matern.oracles.dense import dense_constrained_oracle
from graph_matern.oracles.finite_difference import fd_graph_cov
from graph_matern.oracles.spectral import spectral_circle_cov, spectral_interval_cov
from tests.utilities import GraphFactory

pytestmark = [pytest.mark.unit]

TS = np.array([0.0, 0.25, 0.6, 1.0])


def fd_error(graph, params, h):
    mesh_cov = fd_graph_cov(graph, params, h)
    ts = np.array([location.t for location in mesh_cov.locations()])
    exact = interval_cov(params, graph.edges[0].length, ts[:, None], ts[None, :])
    return float(np.max(np.abs(mesh_cov.covariance - exact)))


class TestSpectral:
    """Test eigen-expansions against the closed forms."""

    @pytest.mark.oracle
    def test_interval_alpha2(self):
        """Should match the interval covariance to 1e-8 with 10^4 terms."""
        params = ModelParams(alpha=2, kappa=1.5, tau=0.8)
        series = spectral_interval_cov(params, 1.0, TS[:, None], TS[None, :], 10_000)
        assert np.allclose(series, interval_cov(params, 1.0, TS[:, None], TS[None, :]), atol=1e-8)

    @pytest.mark.oracle
    @pytest.mark.slow
    def test_interval_alpha1(self):
        """Should match the interval covariance to 1e-6 with 10^6 terms."""
        params = ModelParams(alpha=1, kappa=1.0, tau=1.0)
        series = spectral_interval_cov(params, 1.0, TS[:, None], TS[None, :], 1_000_000)
        assert np.allclose(series, interval_cov(params, 1.0, TS[:, None], TS[None, :]), atol=1e-6)

    @pytest.mark.oracle
    def test_circle_alpha2(self):
        """Should match the circle covariance."""
        params = ModelParams(alpha=2, kappa=0.9, tau=1.2)
        ts = np.array([0.0, 0.5, 1.3, 1.9])
        series = spectral_circle_cov(params, 2.0, ts[:, None], ts[None, :], 10_000)
        assert np.allclose(series, circle_cov(params, 2.0, ts[:, None], ts[None, :]), atol=1e-8)

    def test_scalar_input(self):
        """Should return a float for scalar locations."""
        value = spectral_circle_cov(ModelParams(alpha=2, kappa=1.0, tau=1.0), 1.0, 0.1, 0.4, 100)
        assert isinstance(value, float)

    def test_rejects_zero_terms(self):
        """Should need at least one term."""
        with pytest.raises(InvalidParameterError):
            spectral_interval_cov(ModelParams(alpha=1, kappa=1.0, tau=1.0), 1.0, 0.0, 0.0, 0)


class TestFiniteDifference:
    """Test the finite-difference mesh covariance."""

    @pytest.mark.parametrize("alpha", [1, 2])
    def test_converges_on_interval(self, alpha):
        """Should reduce the error by a clear factor when h is halved."""
        params = ModelParams(alpha=alpha, kappa=1.0, tau=1.0)
        graph = GraphFactory.interval(1.0)
        coarse, fine = fd_error(graph, params, 0.1), fd_error(graph, params, 0.05)
        assert fine / coarse < 0.6
        assert fine < 1e-2

    def test_node_locations(self, star):
        """Should place one node per mesh vertex on the original edges."""
        mesh_cov = fd_graph_cov(star, ModelParams(alpha=1, kappa=1.0, tau=1.0), 0.25)
        locations = mesh_cov.locations()
        assert len(locations) == mesh_cov.covariance.shape[0]
        assert {location.edge for location in locations} <= {"arm0", "arm1", "arm2"}

    def test_circle_variance(self, circle):
        """Should give nearly constant variance on a circle."""
        params = ModelParams(alpha=1, kappa=1.0, tau=1.0)
        variance = np.diag(fd_graph_cov(circle, params, 0.05).covariance)
        assert np.ptp(variance) < 1e-10
        assert variance[0] == pytest.approx(circle_cov(params, 2.0, 0.0, 0.0), rel=1e-2)

    def test_mesh_size_guard(self, interval):
        """Should refuse meshes above the node limit."""
        with pytest.raises(ResourceLimitError):
            fd_graph_cov(interval, ModelParams(alpha=1, kappa=1.0, tau=1.0), 1e-4)


class TestDenseOracle:
    """Test the dense conditioning reference."""

    def test_size_guard(self):
        """Should refuse precisions above the dense limit."""
        with pytest.raises(ResourceLimitError):
            dense_constrained_oracle(np.eye(501), np.zeros((0, 501)), np.zeros((0, 501)), np.zeros((0, 0)), [])

    def test_unconstrained_regression(self):
        """Should reduce to Gaussian regression without constraints."""
        precision = np.array([[2.0, -0.5], [-0.5, 1.0]])
        prior = np.linalg.inv(precision)
        B = np.array([[1.0, 1.0]])
        result = dense_constrained_oracle(precision, np.zeros((0, 2)), B, np.array([[0.1]]), np.array([0.4]))
        gain = prior @ B.T / (B @ prior @ B.T + 0.1)
        assert np.allclose(result.mean, (gain * 0.4).ravel())
        assert np.allclose(result.covariance, prior - gain @ B @ prior)

    def test_constraint_pins_value(self):
        """Should give zero variance along a constrained direction."""
        precision = np.eye(3)
        K = np.array([[1.0, -1.0, 0.0]])
        result = dense_constrained_oracle(precision, K, np.zeros((0, 3)), np.zeros((0, 0)), [], b=np.array([0.0]))
        assert K @ result.covariance @ K.T == pytest.approx(np.zeros((1, 1)), abs=1e-12)

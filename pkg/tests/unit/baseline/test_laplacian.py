"""Unit tests for the graph-Laplacian baseline."""

import math

import numpy as np
import pytest

from graph_matern.baseline.laplacian import (
    adjacency,
    defect_closed_form,
    graph_laplacian_precision,
    kappa_zero_limit_check,
    laplacian,
    laplacian_defect,
    matched_constants,
    sherman_morrison_gap,
    subdivision_convergence,
)
from graph_matern.core.exceptions import InvalidParameterError
from graph_matern.models.params import ModelParams
from tests.utilities import GraphFactory

pytestmark = [pytest.mark.unit]


@pytest.fixture
def unit_star():
    return GraphFactory.star((1.0, 1.0, 1.0))


class TestLaplacian:
    """Test adjacency, Laplacian and the Laplacian precision."""

    def test_rows_sum_to_zero(self, star):
        """Should give a Laplacian with zero row sums."""
        assert np.allclose(np.asarray(laplacian(star).sum(axis=1)).ravel(), 0.0)

    def test_parallel_edges_add_and_loops_drop(self):
        """Should add parallel edges and ignore loops."""
        graph = GraphFactory.tadpole()
        w = adjacency(graph).toarray()
        assert w[1, 2] == 2.0
        assert w[1, 1] == 0.0

    def test_alpha2_is_square(self, star):
        """Should square the alpha = 1 precision."""
        q1 = graph_laplacian_precision(star, 0.7, 1).toarray()
        q2 = graph_laplacian_precision(star, 0.7, 2).toarray()
        assert np.allclose(q2, q1 @ q1)

    def test_rejects_bad_arguments(self, star):
        """Should reject unsupported alpha and non-positive kappa_hat."""
        with pytest.raises(InvalidParameterError):
            graph_laplacian_precision(star, 1.0, 3)
        with pytest.raises(InvalidParameterError):
            graph_laplacian_precision(star, 0.0, 1)

    def test_matched_constants(self):
        """Should give c_hat = e^{-kappa h} / (1 - e^{-2 kappa h})."""
        c_hat, kappa_hat2 = matched_constants(1.0, 0.5)
        assert c_hat == pytest.approx(math.exp(-0.5) / (1.0 - math.exp(-1.0)))
        assert kappa_hat2 == pytest.approx(1.0 / c_hat + 2.0 * math.exp(-0.5) - 2.0)
        assert kappa_hat2 > 0


class TestDefect:
    """Test the relation between the exact and the Laplacian precision."""

    def test_defect_is_diagonal_at_odd_degrees(self, unit_star):
        """Should vanish off the diagonal and at degree-2 vertices."""
        params = ModelParams(alpha=1, kappa=1.3, tau=0.9)
        mesh, defect = laplacian_defect(unit_star, params, 0.25)
        dense = defect.toarray()
        assert np.abs(dense - np.diag(np.diag(dense))).max() < 1e-10
        assert np.diag(dense) == pytest.approx(defect_closed_form(mesh.degrees, 1.3, 0.25), abs=1e-10)
        assert np.abs(np.diag(dense)[mesh.degrees == 2]).max() < 1e-10

    def test_closed_form_zero_at_degree_two(self):
        """Should vanish for degree-2 vertices."""
        assert float(defect_closed_form(2, 0.8, 0.1)) == pytest.approx(0.0, abs=1e-15)

    def test_subdivision_error_decreases(self, unit_star):
        """Should approach the exact vertex covariance as the mesh is refined."""
        params = ModelParams(alpha=1, kappa=1.0, tau=1.0)
        rows = subdivision_convergence(unit_star, params, [1.0, 0.5, 0.25, 0.125])
        errors = [row.max_abs_error for row in rows]
        assert all(later < earlier for earlier, later in zip(errors, errors[1:], strict=False))

    def test_subdivision_needs_alpha1(self, unit_star, params2):
        """Should refuse alpha = 2."""
        with pytest.raises(InvalidParameterError, match="alpha = 1"):
            subdivision_convergence(unit_star, params2, [0.5])

    def test_sherman_morrison_rank_one_gap(self, figure_eight):
        """Should explain the covariance gap by one rank-one update."""
        params = ModelParams(alpha=1, kappa=1.2, tau=0.8)
        assert sherman_morrison_gap(figure_eight, params, 0.25) < 1e-10

    def test_sherman_morrison_needs_one_defect_vertex(self, unit_star):
        """Should reject graphs with several vertices of degree other than 2."""
        with pytest.raises(InvalidParameterError, match="exactly one vertex"):
            sherman_morrison_gap(unit_star, ModelParams(alpha=1, kappa=1.0, tau=1.0), 0.5)


class TestKappaZeroLimit:
    """Test the weighted-Laplacian limit of the vertex precision."""

    def test_limit_reached(self, star):
        """Should agree with the length-weighted Laplacian for small kappa."""
        rows = kappa_zero_limit_check(star, [1e-2, 1e-4, 1e-6])
        assert rows[-1].max_abs_error < 1e-4
        assert rows[0].max_abs_error > rows[-1].max_abs_error

    def test_rejects_loops(self, figure_eight):
        """Should refuse graphs with loops."""
        with pytest.raises(InvalidParameterError, match="loops"):
            kappa_zero_limit_check(figure_eight, [1e-3])

"""Unit tests for the lattice graph and the benchmark service."""

import pytest

from graph_matern.core.exceptions import InvalidParameterError
from graph_matern.models.params import ModelParams
from graph_matern.services import benchmark_service
from graph_matern.services.benchmark_service import BenchmarkService, lattice_graph

pytestmark = [pytest.mark.unit]


class TestLatticeGraph:
    """Test the street-grid graph."""

    def test_counts(self):
        """Should have rows * cols vertices and the grid's edges."""
        graph = lattice_graph(3, 4)
        assert graph.n_vertices == 12
        assert graph.n_edges == 3 * 3 + 2 * 4
        assert graph.coordinate(0) == (0.0, 0.0)

    def test_subdivided(self):
        """Should subdivide every street with mesh width h."""
        graph = lattice_graph(2, 2, spacing=1.0, h=0.25)
        assert graph.n_edges == 16
        assert graph.total_length == pytest.approx(4.0)

    def test_too_small(self):
        """Should need at least two vertices."""
        with pytest.raises(InvalidParameterError):
            lattice_graph(1, 1)


class TestBenchmarkService:
    """Test timing runs."""

    @pytest.fixture
    def params(self):
        return ModelParams(alpha=1, kappa=2.0, tau=1.0, sigma=0.1)

    def test_rows_per_method_and_size(self, params):
        """Should time every evaluator at every size."""
        service = BenchmarkService(lattice_graph(3, 3), params, seed=1)
        rows = service.run([10, 20], repeats=2)
        assert [(row.method, row.n) for row in rows] == [
            ("dense", 10),
            ("extended", 10),
            ("bridge", 10),
            ("dense", 20),
            ("extended", 20),
            ("bridge", 20),
        ]
        assert all(row.mean_seconds > 0 and row.repeats == 2 for row in rows)

    def test_requires_noise(self):
        """Should refuse sigma = 0."""
        with pytest.raises(InvalidParameterError, match="sigma > 0"):
            BenchmarkService(lattice_graph(2, 2), ModelParams(alpha=1, kappa=1.0, tau=1.0))

    def test_unknown_method(self, params):
        """Should reject unknown evaluators."""
        with pytest.raises(InvalidParameterError, match="unknown method"):
            BenchmarkService(lattice_graph(2, 2), params).run([5], methods=["fast"])

    def test_repeats_positive(self, params):
        """Should need at least one repeat."""
        with pytest.raises(InvalidParameterError):
            BenchmarkService(lattice_graph(2, 2), params).run([5], repeats=0)

    def test_each_call_starts_cold(self, params, monkeypatch):
        """Should clear the structure caches before every timed call."""
        calls = []
        monkeypatch.setattr(benchmark_service, "clear_structure_caches", lambda: calls.append(1))
        BenchmarkService(lattice_graph(2, 2), params, seed=2).run([6], repeats=3, methods=["extended", "bridge"])
        assert len(calls) == 6

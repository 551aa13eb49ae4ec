"""Timing of the likelihood evaluators on a grid-like graph."""

import statistics
import time
from collections.abc import Sequence

import networkx as nx
import numpy as np

from graph_matern.core.exceptions import InvalidParameterError
from graph_matern.core.logging_config import get_logger
from graph_matern.graph.locations import uniform_locations
from graph_matern.graph.metric_graph import MetricGraph, build_graph
from graph_matern.graph.surgery import subdivide
from graph_matern.inference.likelihood import METHODS, clear_structure_caches
from graph_matern.inference.simulation import simulate_field, simulate_observations
from graph_matern.models.params import ModelParams
from graph_matern.models.results import BenchmarkRow

logger = get_logger(__name__)

DEFAULT_METHODS = ("dense", "extended", "bridge")


def lattice_graph(rows: int, cols: int, spacing: float = 1.0, h: float | None = None) -> MetricGraph:
    """rows x cols street grid with unit coordinates, optionally subdivided with mesh width h."""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise InvalidParameterError(f"lattice needs at least two vertices, got {rows}x{cols}", field="lattice")
    grid = nx.grid_2d_graph(rows, cols)
    ids = {node: f"{node[0]}_{node[1]}" for node in grid.nodes}
    nodes = sorted(grid.nodes)
    edges = [(f"e{k}", ids[a], ids[b], spacing) for k, (a, b) in enumerate(sorted(grid.edges))]
    coordinates = [(node[1] * spacing, node[0] * spacing) for node in nodes]
    graph = build_graph([ids[node] for node in nodes], edges, coordinates)
    return subdivide(graph, h) if h else graph


class BenchmarkService:
    """Mean and median wall-clock time of each evaluator over repeated calls.

    Every call starts from empty structure caches, so a timing covers the whole evaluation.
    """

    def __init__(self, graph: MetricGraph, params: ModelParams, seed: int | None = None):
        if params.sigma <= 0:
            raise InvalidParameterError("benchmarks use noisy observations (sigma > 0)", field="sigma")
        self.graph = graph
        self.params = params
        self.seed = seed

    def _observations(self, n: int, seed: np.random.SeedSequence):
        rng = np.random.default_rng(seed)
        locations = uniform_locations(self.graph, n, rng)
        values = simulate_field(self.graph, self.params, locations, seed=int(rng.integers(2**63)))
        return simulate_observations(locations, values, self.params.sigma, seed=int(rng.integers(2**63)))

    def run(
        self, n_grid: Sequence[int], repeats: int = 5, methods: Sequence[str] = DEFAULT_METHODS
    ) -> list[BenchmarkRow]:
        if repeats < 1:
            raise InvalidParameterError(f"repeats must be positive, got {repeats}", field="repeats")
        unknown = [m for m in methods if m not in METHODS]
        if unknown:
            raise InvalidParameterError(f"unknown method(s) {', '.join(unknown)}", field="methods")

        rows = []
        for n, seed in zip(n_grid, np.random.SeedSequence(self.seed).spawn(len(n_grid)), strict=True):
            obs = self._observations(n, seed)
            for method in methods:
                evaluator = METHODS[method]
                timings = []
                for _ in range(repeats):
                    clear_structure_caches()
                    start = time.perf_counter()
                    evaluator(self.graph, self.params, obs)
                    timings.append(time.perf_counter() - start)
                rows.append(
                    BenchmarkRow(
                        method=method,
                        n=n,
                        repeats=repeats,
                        mean_seconds=statistics.fmean(timings),
                        median_seconds=statistics.median(timings),
                    )
                )
                logger.info(f"Benchmark {method} n={n}: mean {statistics.fmean(timings):.4g}s")
        return rows

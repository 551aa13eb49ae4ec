"""Pytest configuration and fixtures for testing."""

import os

os.environ["TESTING"] = "1"

from pathlib import Path

import numpy as np
import pytest

from graph_matern.graph.metric_graph import MetricGraph
from graph_matern.models.params import ModelParams
from tests.utilities import GraphFactory

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    """Directory with graph and observation files."""
    return FIXTURES


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator; every test gets the same stream."""
    return np.random.default_rng(20240611)


@pytest.fixture
def interval() -> MetricGraph:
    """Single edge of length 1 between two degree-1 vertices."""
    return GraphFactory.interval(1.0)


@pytest.fixture
def circle() -> MetricGraph:
    """One vertex carrying a loop of length 2."""
    return GraphFactory.circle(2.0)


@pytest.fixture
def star() -> MetricGraph:
    """Tree with one degree-3 vertex and unequal arms."""
    return GraphFactory.star((1.0, 0.5, 1.5))


@pytest.fixture
def figure_eight() -> MetricGraph:
    """Two loops sharing one vertex."""
    return GraphFactory.figure_eight((1.0, 1.5))


@pytest.fixture
def params1() -> ModelParams:
    return ModelParams(alpha=1, kappa=1.5, tau=0.8, sigma=0.3)


@pytest.fixture
def params2() -> ModelParams:
    return ModelParams(alpha=2, kappa=1.5, tau=0.8, sigma=0.3)

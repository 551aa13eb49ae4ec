"""Exact simulation of the field at arbitrary locations and of noisy observations.

The field on an edge is S_e(t) U_e plus an independent bridge; U is drawn from the
constrained model and every edge bridge from its own child seed.
"""

from collections.abc import Sequence

import numpy as np
from scipy.linalg import LinAlgError, cholesky

from graph_matern.core.exceptions import InvalidParameterError, NotPositiveDefiniteError
from graph_matern.core.logging_config import get_logger
from graph_matern.core.settings import settings
from graph_matern.graph.metric_graph import Location, MetricGraph
from graph_matern.graph.surgery import split_loops
from graph_matern.inference.constrained import build_model, sample_constrained
from graph_matern.inference.likelihood import edge_groups
from graph_matern.inference.observations import ObservationSet
from graph_matern.kernels.edge import boundary_weights_S, bridge_cov
from graph_matern.models.params import ModelParams
from graph_matern.precision.assembly import DofIndex

logger = get_logger(__name__)


def _bridge_factor(params: ModelParams, length: float, ts: np.ndarray, edge_id: str) -> np.ndarray:
    cov = np.atleast_2d(bridge_cov(params, length, ts, ts))
    try:
        return cholesky(cov, lower=True)
    except LinAlgError:
        jitter = settings.BRIDGE_JITTER * float(np.max(np.diag(cov)))
        logger.warning(f"Bridge covariance on edge '{edge_id}' is not positive definite; adding jitter {jitter:.3e}")
        try:
            return cholesky(cov + jitter * np.eye(ts.size), lower=True)
        except LinAlgError as e:
            raise NotPositiveDefiniteError("bridge covariance", str(e)) from e


def simulate_field(
    graph: MetricGraph,
    params: ModelParams,
    locations: Sequence[Location],
    seed: int | None = None,
    n_samples: int | None = None,
) -> np.ndarray:
    """Draw u at the locations: shape (len(locations),), or (n_samples, len(locations))."""
    if n_samples is not None and n_samples < 1:
        raise InvalidParameterError(f"n_samples must be positive, got {n_samples}", field="n_samples")

    base = split_loops(graph) if params.alpha > 1 else graph
    count = 1 if n_samples is None else n_samples
    children = np.random.SeedSequence(seed).spawn(1 + base.n_edges)

    _, draws = sample_constrained(build_model(base, params), np.random.default_rng(children[0]), count)
    dofs = DofIndex(params.alpha, base.n_edges)
    values = np.empty((count, len(locations)))

    for e, members in edge_groups(base, locations).items():
        edge = base.edges[e]
        index = np.array([i for i, _ in members], dtype=int)
        ts = np.array([t for _, t in members])

        weights = np.atleast_2d(boundary_weights_S(params, edge.length, ts))
        values[:, index] = draws[:, dofs.edge_dofs(e)] @ weights.T

        tol = settings.COINCIDENCE_RTOL * edge.length
        interior = (ts > tol) & (ts < edge.length - tol)
        if not np.any(interior):
            continue
        unique, inverse = np.unique(ts[interior], return_inverse=True)
        factor = _bridge_factor(params, edge.length, unique, edge.id)
        z = np.random.default_rng(children[1 + e]).standard_normal((unique.size, count))
        values[:, index[interior]] += (factor @ z)[inverse].T

    logger.debug(f"Simulated {count} draw(s) at {len(locations)} locations on {base.n_edges} edges")
    return values[0] if n_samples is None else values


def simulate_observations(
    locations: Sequence[Location],
    values: np.ndarray,
    sigma: float,
    seed: int | None = None,
) -> ObservationSet:
    """y_i = u(s_i) + N(0, sigma^2) noise."""
    if not sigma >= 0:
        raise InvalidParameterError(f"sigma must be non-negative, got {sigma}", field="sigma", value=sigma)
    values = np.asarray(values, dtype=float)
    if sigma > 0:
        values = values + sigma * np.random.default_rng(seed).standard_normal(values.shape)
    return ObservationSet(tuple(locations), values)

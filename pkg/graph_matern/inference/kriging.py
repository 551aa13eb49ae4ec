"""Exact kriging: posterior mean and variance of the field at arbitrary graph locations.

Observation and target locations become vertices of one extended graph, so a single
factorization serves every target of a call.
"""

from collections.abc import Sequence

import numpy as np
import scipy.sparse as sp

from graph_matern.core.exceptions import InvalidParameterError
from graph_matern.core.logging_config import get_logger
from graph_matern.graph.locations import edge_grid
from graph_matern.graph.metric_graph import Location, MetricGraph
from graph_matern.graph.surgery import split_loops
from graph_matern.inference.constrained import (
    ConstrainedPosterior,
    build_model,
    condition_on_vertices,
    posterior_u,
    prior_posterior,
)
from graph_matern.inference.covariance import BlockDiagonalCovariance
from graph_matern.inference.gaussian import canonical_update, schur_marginal_loglik
from graph_matern.inference.likelihood import extend_with_locations
from graph_matern.inference.observations import ObservationSet, require_distinct
from graph_matern.kernels.edge import boundary_weights_S, bridge_cov
from graph_matern.models.params import ModelParams
from graph_matern.models.results import GaussianPredictive, VariancePoint
from graph_matern.precision.assembly import DofIndex, alpha1_vertex_precision
from graph_matern.precision.factor import SparseCholesky

logger = get_logger(__name__)


def _predictives(
    targets: Sequence[Location],
    mean: np.ndarray,
    var: np.ndarray,
    params: ModelParams,
    predictive: bool,
) -> list[GaussianPredictive]:
    noise = params.sigma**2 if predictive else 0.0
    return [
        GaussianPredictive(
            edge=location.edge,
            t=location.t,
            mean=float(m),
            var=float(max(v, 0.0) + noise),
            includes_noise=predictive,
        )
        for location, m, v in zip(targets, mean, var, strict=True)
    ]


def _inverse_diagonal(factor: SparseCholesky, size: int, index: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Selected diagonal entries of the inverse by column solves."""
    out = np.empty(index.size)
    for start in range(0, index.size, chunk):
        cols = index[start : start + chunk]
        rhs = sp.csc_matrix((np.ones(cols.size), (cols, np.arange(cols.size))), shape=(size, cols.size))
        solved = factor.solve(rhs)
        out[start : start + chunk] = solved[cols, np.arange(cols.size)]
    return out


def _split_mapping(obs: ObservationSet, targets: Sequence[Location]) -> list[Location]:
    if not targets:
        raise InvalidParameterError("no prediction targets given", field="targets")
    return list(obs.locations) + list(targets)


def krig_alpha1(
    graph: MetricGraph,
    params: ModelParams,
    obs: ObservationSet,
    targets: Sequence[Location],
    predictive: bool = False,
) -> list[GaussianPredictive]:
    """alpha = 1 kriging with the explicit vertex precision of the extended graph."""
    if params.alpha != 1:
        raise InvalidParameterError("vertex-precision kriging needs alpha = 1", field="alpha")

    extended, mapping = extend_with_locations(graph, params, _split_mapping(obs, targets))
    observed, wanted = mapping[: obs.n], mapping[obs.n :]
    q = alpha1_vertex_precision(extended, params)
    size = extended.n_vertices

    if params.sigma == 0:
        require_distinct(observed.tolist())
        _, remaining, conditional, factor = schur_marginal_loglik(
            q.matrix, q.factor, np.zeros(size), observed, obs.values
        )
        mean = np.empty(size)
        mean[observed] = obs.values
        mean[remaining] = conditional
        var = np.zeros(size)
        position = np.searchsorted(remaining, wanted)
        free = np.isin(wanted, remaining)
        if np.any(free):
            var[wanted[free]] = _inverse_diagonal(factor, remaining.size, position[free])
    else:
        noise = BlockDiagonalCovariance.diagonal(np.full(obs.n, params.sigma**2))
        design = sp.csr_matrix((np.ones(obs.n), (np.arange(obs.n), observed)), shape=(obs.n, size))
        update = canonical_update(q.matrix, q.factor, np.zeros(size), design, noise, obs.values)
        mean = update.mean
        var = np.zeros(size)
        var[wanted] = _inverse_diagonal(update.factor, size, wanted)

    logger.debug(f"Kriged {len(targets)} targets from {obs.n} observations (alpha=1)")
    return _predictives(targets, mean[wanted], var[wanted], params, predictive)


def posterior_on_extended(
    graph: MetricGraph, params: ModelParams, obs: ObservationSet, targets: Sequence[Location]
) -> tuple[ConstrainedPosterior, sp.csr_matrix]:
    """Posterior of the constrained model on the extended graph and the target selector."""
    extended, mapping = extend_with_locations(graph, params, _split_mapping(obs, targets))
    observed, wanted = mapping[: obs.n], mapping[obs.n :]
    model = build_model(extended, params)
    selector = model.constraints.A

    if params.sigma == 0:
        require_distinct(observed.tolist())
        posterior = condition_on_vertices(model, observed, obs.values)
    else:
        noise = BlockDiagonalCovariance.diagonal(np.full(obs.n, params.sigma**2))
        posterior = posterior_u(model, selector[observed], noise, obs.values)
    return posterior, selector[wanted]


def krig_alphaN(
    graph: MetricGraph,
    params: ModelParams,
    obs: ObservationSet,
    targets: Sequence[Location],
    predictive: bool = False,
) -> list[GaussianPredictive]:
    """Kriging through the constrained boundaryless model; any supported alpha."""
    posterior, selector = posterior_on_extended(graph, params, obs, targets)
    mean = selector @ posterior.mean
    var = posterior.variances(selector)
    logger.debug(f"Kriged {len(targets)} targets from {obs.n} observations (alpha={params.alpha})")
    return _predictives(targets, mean, var, params, predictive)


def krig(
    graph: MetricGraph,
    params: ModelParams,
    obs: ObservationSet,
    targets: Sequence[Location],
    predictive: bool = False,
) -> list[GaussianPredictive]:
    """alpha = 1 uses the vertex precision, otherwise the constrained model."""
    if params.alpha == 1:
        return krig_alpha1(graph, params, obs, targets, predictive)
    return krig_alphaN(graph, params, obs, targets, predictive)


def variance_map(graph: MetricGraph, params: ModelParams, resolution: float) -> list[VariancePoint]:
    """Prior marginal variance on a per-edge grid: S Cov(U_e) S^T + r_B(t, t)."""
    grid = edge_grid(graph, resolution)
    base = split_loops(graph) if params.alpha > 1 else graph
    prior = prior_posterior(build_model(base, params))
    dofs = DofIndex(params.alpha, base.n_edges)

    by_edge: dict[int, list[tuple[int, float]]] = {}
    for i, location in enumerate(grid):
        e, t = base.locate(location)
        by_edge.setdefault(e, []).append((i, t))

    var = np.empty(len(grid))
    for e, members in by_edge.items():
        length = base.edges[e].length
        select = sp.csr_matrix(
            (np.ones(dofs.per_edge), (np.arange(dofs.per_edge), dofs.edge_dofs(e))),
            shape=(dofs.per_edge, dofs.size),
        )
        endpoint_cov = prior.covariance(select)
        ts = np.array([t for _, t in members])
        weights = np.atleast_2d(boundary_weights_S(params, length, ts))
        bridge = np.diag(np.atleast_2d(bridge_cov(params, length, ts, ts)))
        values = np.einsum("ij,jk,ik->i", weights, endpoint_cov, weights) + bridge
        var[[i for i, _ in members]] = np.maximum(values, 0.0)

    logger.debug(f"Variance map: {len(grid)} grid points on {graph.n_edges} edges")
    return [
        VariancePoint(edge=location.edge, t=location.t, var=float(v)) for location, v in zip(grid, var, strict=True)
    ]

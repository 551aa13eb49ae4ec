"""Exact log-likelihood of (noisy) point observations of the graph field.

Four evaluators share one contract and one set of additive constants:
    dense     covariance of the observations, then a dense Gaussian density
    extended  alpha = 1 vertex precision on the graph with observation vertices added
    bridge    alpha = 1 vertex precision on the original graph, edge bridges in the noise
    constrained  boundaryless model under Kirchhoff constraints, any supported alpha
"""

import math
from collections import defaultdict
from collections.abc import Callable, Sequence
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from graph_matern.core.exceptions import (
    InvalidObservationError,
    InvalidParameterError,
    NotPositiveDefiniteError,
    SingularSystemError,
)
from graph_matern.core.logging_config import get_logger
from graph_matern.graph.metric_graph import Location, MetricGraph
from graph_matern.graph.surgery import add_location_vertices, split_loops
from graph_matern.inference.constrained import (
    build_model,
    condition_on_vertices,
    constrained_covariance,
    density_y_given_constraints,
)
from graph_matern.inference.covariance import BlockDiagonalCovariance
from graph_matern.inference.gaussian import LOG_2PI, canonical_update, schur_marginal_loglik
from graph_matern.inference.observations import ObservationSet, require_distinct
from graph_matern.kernels.edge import boundary_weights_S, bridge_cov
from graph_matern.models.params import ModelParams
from graph_matern.precision.assembly import DofIndex, alpha1_vertex_precision
from graph_matern.precision.constraints import clear_constraint_cache

logger = get_logger(__name__)

Evaluator = Callable[[MetricGraph, ModelParams, ObservationSet], float]


# ============================================================================
# Shared helpers
# ============================================================================


def extend_with_locations(
    graph: MetricGraph, params: ModelParams, locations: Sequence[Location]
) -> tuple[MetricGraph, np.ndarray]:
    """Graph with a vertex at every location (loops split for alpha = 2) and the vertex of each."""
    extended, mapping = _extended_graph(graph, params.alpha > 1, tuple(locations))
    return extended, np.asarray(mapping, dtype=int)


@lru_cache(maxsize=32)
def _extended_graph(
    graph: MetricGraph, split: bool, locations: tuple[Location, ...]
) -> tuple[MetricGraph, tuple[int, ...]]:
    # depends on the locations only, never on kappa or tau
    extended, mapping = add_location_vertices(graph, locations)
    if split:
        extended = split_loops(extended)
    return extended, tuple(mapping)


def clear_structure_caches() -> None:
    """Drop the cached extended graphs and constraint systems."""
    _extended_graph.cache_clear()
    clear_constraint_cache()


def edge_groups(graph: MetricGraph, locations: Sequence[Location]) -> dict[int, list[tuple[int, float]]]:
    """Observation indices and local positions grouped by edge."""
    groups: dict[int, list[tuple[int, float]]] = defaultdict(list)
    for i, location in enumerate(locations):
        e, t = graph.locate(location)
        groups[e].append((i, t))
    return dict(groups)


def bridge_noise(
    graph: MetricGraph,
    params: ModelParams,
    groups: dict[int, list[tuple[int, float]]],
    n: int,
) -> BlockDiagonalCovariance:
    """Per-edge blocks r_B(t_i, t_j) + sigma^2 I."""
    blocks = []
    for e, members in groups.items():
        index = np.array([i for i, _ in members], dtype=int)
        ts = np.array([t for _, t in members])
        block = np.atleast_2d(bridge_cov(params, graph.edges[e].length, ts, ts))
        blocks.append((index, block + params.sigma**2 * np.eye(index.size)))
    return BlockDiagonalCovariance(n, blocks, "bridge observation covariance")


def _check_direct_bridge(graph: MetricGraph, params: ModelParams, groups: dict[int, list[tuple[int, float]]]) -> None:
    """Direct observations through bridges need interior, sparse-enough points."""
    for e, members in groups.items():
        length = graph.edges[e].length
        if len(members) > params.alpha:
            raise InvalidObservationError(
                f"direct observations: edge '{graph.edges[e].id}' has {len(members)} observations "
                f"(at most {params.alpha} allowed on the bridge path)",
                field="locations",
            )
        for _, t in members:
            if t <= 1e-12 * length or t >= length * (1.0 - 1e-12):
                raise InvalidObservationError(
                    "direct observations at vertices are not supported on the bridge path", field="locations"
                )


def _has_vertex_observation(graph: MetricGraph, groups: dict[int, list[tuple[int, float]]]) -> bool:
    for e, members in groups.items():
        length = graph.edges[e].length
        if any(t <= 1e-12 * length or t >= length * (1.0 - 1e-12) for _, t in members):
            return True
    return False


def _selection(mapping: np.ndarray, size: int) -> sp.csr_matrix:
    n = mapping.size
    return sp.csr_matrix((np.ones(n), (np.arange(n), mapping)), shape=(n, size))


# ============================================================================
# Evaluators
# ============================================================================


def location_covariance(graph: MetricGraph, params: ModelParams, locations: Sequence[Location]) -> np.ndarray:
    """Dense covariance of the latent field at the locations."""
    extended, mapping = extend_with_locations(graph, params, locations)
    model = build_model(extended, params)
    return constrained_covariance(model, model.constraints.A[mapping])


def loglik_dense(graph: MetricGraph, params: ModelParams, obs: ObservationSet) -> float:
    """Full Gaussian density from the dense covariance of the observations."""
    if params.sigma == 0:
        _, mapping = add_location_vertices(graph, obs.locations)
        require_distinct(mapping)

    cov = location_covariance(graph, params, obs.locations) + params.sigma**2 * np.eye(obs.n)
    try:
        factor = cho_factor(cov, lower=True)
    except LinAlgError as e:
        raise SingularSystemError("observation covariance", str(e)) from e

    logdet = 2.0 * float(np.sum(np.log(np.diag(factor[0]))))
    quad = float(obs.values @ cho_solve(factor, obs.values))
    return -0.5 * obs.n * LOG_2PI - 0.5 * logdet - 0.5 * quad


def loglik_alpha1_extended(graph: MetricGraph, params: ModelParams, obs: ObservationSet) -> float:
    """alpha = 1 on the graph extended by the observation locations."""
    if params.alpha != 1:
        raise InvalidParameterError("the extended-graph evaluator needs alpha = 1", field="alpha")

    extended, mapping = extend_with_locations(graph, params, obs.locations)
    q = alpha1_vertex_precision(extended, params)
    zero_mean = np.zeros(extended.n_vertices)

    if params.sigma == 0:
        require_distinct(mapping.tolist())
        value, _, _, _ = schur_marginal_loglik(q.matrix, q.factor, zero_mean, mapping, obs.values)
        return value

    noise = BlockDiagonalCovariance.diagonal(np.full(obs.n, params.sigma**2))
    design = _selection(mapping, extended.n_vertices)
    return canonical_update(q.matrix, q.factor, zero_mean, design, noise, obs.values).loglik


def loglik_alpha1_bridge(graph: MetricGraph, params: ModelParams, obs: ObservationSet) -> float:
    """alpha = 1 with the vertex precision of the original graph and per-edge bridge blocks."""
    if params.alpha != 1:
        raise InvalidParameterError("the bridge evaluator needs alpha = 1", field="alpha")

    groups = edge_groups(graph, obs.locations)
    if params.sigma == 0:
        _check_direct_bridge(graph, params, groups)

    rows, cols, vals = [], [], []
    for e, members in groups.items():
        edge = graph.edges[e]
        ts = np.array([t for _, t in members])
        weights = np.atleast_2d(boundary_weights_S(params, edge.length, ts))
        for (i, _), w in zip(members, weights, strict=True):
            rows += [i, i]
            cols += [edge.start, edge.end]
            vals += [w[0], w[1]]
    design = sp.csr_matrix((vals, (rows, cols)), shape=(obs.n, graph.n_vertices))

    q = alpha1_vertex_precision(graph, params)
    noise = bridge_noise(graph, params, groups, obs.n)
    return canonical_update(q.matrix, q.factor, np.zeros(graph.n_vertices), design, noise, obs.values).loglik


def loglik_alphaN(graph: MetricGraph, params: ModelParams, obs: ObservationSet) -> float:
    """Constrained boundaryless model: y = B U + bridges + noise, B from boundary weights."""
    base = split_loops(graph) if params.alpha > 1 else graph
    groups = edge_groups(base, obs.locations)

    if params.sigma == 0:
        extended, mapping = extend_with_locations(graph, params, obs.locations)
        require_distinct(mapping.tolist())
        if _has_vertex_observation(base, groups) or any(len(m) > params.alpha for m in groups.values()):
            model = build_model(extended, params)
            return condition_on_vertices(model, mapping, obs.values).loglik

    dofs = DofIndex(params.alpha, base.n_edges)
    rows, cols, vals = [], [], []
    for e, members in groups.items():
        edge = base.edges[e]
        ts = np.array([t for _, t in members])
        weights = np.atleast_2d(boundary_weights_S(params, edge.length, ts))
        edge_dofs = dofs.edge_dofs(e)
        for (i, _), w in zip(members, weights, strict=True):
            rows.extend([i] * edge_dofs.size)
            cols.extend(edge_dofs)
            vals.extend(w)
    design = sp.csr_matrix((vals, (rows, cols)), shape=(obs.n, dofs.size))

    try:
        noise = bridge_noise(base, params, groups, obs.n)
    except NotPositiveDefiniteError as e:
        raise SingularSystemError("observation covariance", e.message) from e
    return density_y_given_constraints(build_model(base, params), design, noise, obs.values)


METHODS: dict[str, Evaluator] = {
    "dense": loglik_dense,
    "extended": loglik_alpha1_extended,
    "bridge": loglik_alpha1_bridge,
    "constrained": loglik_alphaN,
}


def loglik(graph: MetricGraph, params: ModelParams, obs: ObservationSet, method: str = "auto") -> float:
    """Dispatch to an evaluator; `auto` is extended for alpha = 1 and constrained otherwise."""
    if method == "auto":
        method = "extended" if params.alpha == 1 else "constrained"
    try:
        evaluator = METHODS[method]
    except KeyError as e:
        raise InvalidParameterError(
            f"unknown likelihood method '{method}' (expected one of {', '.join(METHODS)})",
            field="method",
            value=method,
        ) from e
    value = evaluator(graph, params, obs)
    if not math.isfinite(value):
        raise SingularSystemError("log-likelihood", f"non-finite value {value}")
    logger.debug(f"loglik[{method}] alpha={params.alpha} kappa={params.kappa:.6g} tau={params.tau:.6g} = {value:.12g}")
    return value


__all__ = [
    "METHODS",
    "bridge_noise",
    "edge_groups",
    "extend_with_locations",
    "location_covariance",
    "loglik",
    "loglik_alpha1_bridge",
    "loglik_alpha1_extended",
    "loglik_alphaN",
    "loglik_dense",
]

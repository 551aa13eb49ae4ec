"""Block-diagonal boundaryless edge precision and the explicit alpha = 1 vertex precision."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.linalg import LinAlgError, cho_factor, cho_solve, cholesky
from scipy.special import gammainc

from graph_matern.core.exceptions import InvalidParameterError, NotPositiveDefiniteError
from graph_matern.core.logging_config import get_logger
from graph_matern.graph.metric_graph import MetricGraph
from graph_matern.models.params import BoundaryMode, ModelParams
from graph_matern.precision.factor import SparseSymMatrix

logger = get_logger(__name__)


@dataclass(frozen=True)
class DofIndex:
    """Layout of the stacked endpoint vector: per edge [X(start), X(end)], X of length alpha."""

    alpha: int
    n_edges: int

    @property
    def size(self) -> int:
        return 2 * self.alpha * self.n_edges

    @property
    def per_edge(self) -> int:
        return 2 * self.alpha

    def dof(self, edge: int, side: int, order: int = 0) -> int:
        return edge * 2 * self.alpha + side * self.alpha + order

    def edge_dofs(self, edge: int) -> np.ndarray:
        return np.arange(edge * self.per_edge, (edge + 1) * self.per_edge)


def stationary_vertices(graph: MetricGraph, params: ModelParams) -> frozenset[int]:
    """Degree-1 vertices carrying the stationary boundary condition."""
    for vertex_id in params.boundary_overrides:
        if vertex_id not in graph.vertex_index:
            raise InvalidParameterError(
                f"boundary override for unknown vertex '{vertex_id}'", field="boundary", value=vertex_id
            )
        if graph.degree(graph.vertex_index[vertex_id]) != 1:
            raise InvalidParameterError(
                f"boundary override for vertex '{vertex_id}' which is not of degree 1",
                field="boundary",
                value=vertex_id,
            )
    return frozenset(
        v
        for v, vertex_id in enumerate(graph.vertex_ids)
        if graph.degree(v) == 1 and params.boundary_at(vertex_id) == BoundaryMode.STATIONARY
    )


def edge_precision(
    params: ModelParams,
    length: float,
    stationary_start: bool = False,
    stationary_end: bool = False,
) -> np.ndarray:
    """Precision of the boundaryless endpoint vector of one edge.

    It is the stationary endpoint precision minus half the inverse marginal covariance at
    each end; a stationary side keeps the full stationary precision.
    """
    if not length > 0:
        raise InvalidParameterError(f"edge length must be positive, got {length}", field="length")
    kappa, tau2 = params.kappa, params.tau**2

    if params.alpha == 1:
        rho = np.exp(-kappa * length)
        base = kappa * tau2 / -np.expm1(-2.0 * kappa * length)
        q = np.array([[base * (1.0 + rho**2), -2.0 * base * rho], [-2.0 * base * rho, base * (1.0 + rho**2)]])
        if stationary_start:
            q[0, 0] += kappa * tau2
        if stationary_end:
            q[1, 1] += kappa * tau2
        return q

    transition, gain = _state_transition(params, length)
    marginal = np.diag([4.0 * kappa**3 * tau2, 4.0 * kappa * tau2])
    top = transition.T @ gain @ transition + 0.5 * marginal
    bottom = gain - 0.5 * marginal
    if stationary_start:
        top += 0.5 * marginal
    if stationary_end:
        bottom += 0.5 * marginal
    cross = -transition.T @ gain
    q = np.block([[top, cross], [cross.T, bottom]])
    return 0.5 * (q + q.T)


def _state_transition(params: ModelParams, length: float) -> tuple[np.ndarray, np.ndarray]:
    """Transition of X = (u, u') along an edge and the inverse of its innovation covariance.

    The innovation covariance is integrated in closed form so it keeps full relative
    accuracy when kappa * length is small.
    """
    kappa, q = params.kappa, 1.0 / params.tau**2
    kl = kappa * length
    decay = np.exp(-kl)
    transition = decay * np.array([[1.0 + kl, length], [-kappa * kl, 1.0 - kl]])

    c11 = q * gammainc(3.0, 2.0 * kl) / (4.0 * kappa**3)
    c12 = 0.5 * q * length**2 * decay**2
    c22 = q * (-np.expm1(-2.0 * kl) / (4.0 * kappa) + 0.5 * length * (1.0 - kl) * decay**2)
    scale = np.sqrt([c11, c22])
    r = c12 / (scale[0] * scale[1])
    try:
        gain = cho_solve(cho_factor(np.array([[1.0, r], [r, 1.0]]), lower=True), np.eye(2))
    except LinAlgError as e:
        raise NotPositiveDefiniteError("innovation covariance", str(e)) from e
    return transition, gain / np.outer(scale, scale)


@dataclass(frozen=True, eq=False)
class BlockPrecision:
    """Block-diagonal precision of the stacked boundaryless endpoint vectors."""

    graph: MetricGraph
    params: ModelParams
    dofs: DofIndex
    blocks: tuple[np.ndarray, ...]

    @cached_property
    def matrix(self) -> SparseSymMatrix:
        return SparseSymMatrix(sp.block_diag(self.blocks, format="csc"), "block precision")

    @cached_property
    def cholesky_factor(self) -> sp.csr_matrix:
        """Lower block-diagonal L with L L^T equal to the block precision."""
        try:
            factors = [cholesky(block, lower=True) for block in self.blocks]
        except LinAlgError as e:
            raise NotPositiveDefiniteError("edge precision block", str(e)) from e
        return sp.block_diag(factors, format="csr")

    def logdet(self) -> float:
        return 2.0 * float(np.sum(np.log(self.cholesky_factor.diagonal())))


def assemble_block_precision(graph: MetricGraph, params: ModelParams) -> BlockPrecision:
    """Assemble the boundaryless precision, edge by edge."""
    if params.alpha > 1 and graph.has_loops:
        raise InvalidParameterError("loops must be split before assembly when alpha = 2", field="alpha")

    stationary = stationary_vertices(graph, params)
    blocks = tuple(
        edge_precision(params, edge.length, edge.start in stationary, edge.end in stationary)
        for edge in graph.edges
    )
    logger.debug(
        f"Assembled block precision: {graph.n_edges} edges, alpha={params.alpha}, "
        f"{len(stationary)} stationary vertices"
    )
    return BlockPrecision(graph, params, DofIndex(params.alpha, graph.n_edges), blocks)


def alpha1_vertex_precision(graph: MetricGraph, params: ModelParams) -> SparseSymMatrix:
    """Precision of the alpha = 1 field at the vertices.

    Per edge with x = exp(-2 kappa l): 2 kappa tau^2 (1/2 + x / (1 - x)) at both ends and
    -2 kappa tau^2 exp(-kappa l) / (1 - x) between them; a loop adds
    2 kappa tau^2 tanh(kappa l / 2) to its vertex; stationary degree-1 vertices add kappa tau^2.
    """
    if params.alpha != 1:
        raise InvalidParameterError("vertex precision is explicit only for alpha = 1", field="alpha")

    kappa, tau2 = params.kappa, params.tau**2
    starts = np.array([edge.start for edge in graph.edges], dtype=int)
    ends = np.array([edge.end for edge in graph.edges], dtype=int)
    kl = kappa * np.array([edge.length for edge in graph.edges])
    loop = starts == ends

    s, e, x = starts[~loop], ends[~loop], kl[~loop]
    one_minus_x = -np.expm1(-2.0 * x)
    diag = kappa * tau2 * (1.0 + np.exp(-2.0 * x)) / one_minus_x
    off = -2.0 * kappa * tau2 * np.exp(-x) / one_minus_x
    stationary = np.array(sorted(stationary_vertices(graph, params)), dtype=int)

    rows = np.concatenate([s, e, s, e, starts[loop], stationary])
    cols = np.concatenate([s, e, e, s, starts[loop], stationary])
    vals = np.concatenate(
        [
            diag,
            diag,
            off,
            off,
            2.0 * kappa * tau2 * np.tanh(kl[loop] / 2.0),
            np.full(stationary.size, kappa * tau2),
        ]
    )

    n = graph.n_vertices
    q = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsc()
    q.sum_duplicates()
    return SparseSymMatrix(q, "vertex precision")

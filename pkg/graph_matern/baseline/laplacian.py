"""Graph-Laplacian Matérn model on the vertices and its relation to the exact field.

On a graph subdivided with mesh width h, c_hat * Q_hat agrees with the exact alpha = 1
vertex precision (scaled by 2 kappa tau^2) except on the diagonal at vertices whose
degree is not 2.
"""

import math
from collections.abc import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from graph_matern.core.exceptions import InvalidParameterError
from graph_matern.core.logging_config import get_logger
from graph_matern.graph.metric_graph import MetricGraph
from graph_matern.graph.surgery import subdivide
from graph_matern.models.params import ModelParams
from graph_matern.models.results import KappaLimitRow, SubdivisionRow
from graph_matern.precision.assembly import alpha1_vertex_precision
from graph_matern.precision.factor import SparseSymMatrix

logger = get_logger(__name__)


def adjacency(graph: MetricGraph, weights: np.ndarray | None = None) -> sp.csr_matrix:
    """Symmetric adjacency; parallel edges add up and loops are dropped."""
    w = np.ones(graph.n_edges) if weights is None else np.asarray(weights, dtype=float)
    rows, cols, vals = [], [], []
    for edge, weight in zip(graph.edges, w, strict=True):
        if edge.is_loop:
            continue
        rows += [edge.start, edge.end]
        cols += [edge.end, edge.start]
        vals += [weight, weight]
    n = graph.n_vertices
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def laplacian(graph: MetricGraph, weights: np.ndarray | None = None) -> sp.csr_matrix:
    """D - W."""
    w = adjacency(graph, weights)
    return (sp.diags(np.asarray(w.sum(axis=1)).ravel()) - w).tocsr()


def graph_laplacian_precision(graph: MetricGraph, kappa_hat: float, alpha: int) -> SparseSymMatrix:
    """(kappa_hat^2 I + D - W)^alpha."""
    if alpha not in (1, 2):
        raise InvalidParameterError(f"alpha must be 1 or 2, got {alpha}", field="alpha", value=alpha)
    if not kappa_hat > 0:
        raise InvalidParameterError(f"kappa_hat must be positive, got {kappa_hat}", field="kappa", value=kappa_hat)
    base = (kappa_hat**2 * sp.identity(graph.n_vertices) + laplacian(graph)).tocsc()
    return SparseSymMatrix(base if alpha == 1 else base @ base, "graph-Laplacian precision")


def matched_constants(kappa: float, h: float) -> tuple[float, float]:
    """(c_hat, kappa_hat^2) matching the exact precision at degree-2 vertices for mesh width h."""
    decay = math.exp(-kappa * h)
    c_hat = decay / -math.expm1(-2.0 * kappa * h)
    return c_hat, 1.0 / c_hat + 2.0 * decay - 2.0


def defect_closed_form(degree: int | np.ndarray, kappa: float, h: float) -> np.ndarray:
    """Diagonal of c_hat Q_hat - Q / (2 kappa tau^2) at a vertex of the given degree."""
    c_hat, _ = matched_constants(kappa, h)
    d = np.asarray(degree, dtype=float)
    return 1.0 - d / 2.0 + c_hat * (d - 2.0) * (-math.expm1(-kappa * h))


def _check_alpha1(params: ModelParams) -> None:
    if params.alpha != 1:
        raise InvalidParameterError("the Laplacian comparison is exact only for alpha = 1", field="alpha")


def laplacian_defect(graph: MetricGraph, params: ModelParams, h: float) -> tuple[MetricGraph, sp.csr_matrix]:
    """Subdivided graph and the matrix c_hat Q_hat - Q / (2 kappa tau^2) on it."""
    _check_alpha1(params)
    mesh = subdivide(graph, h)
    c_hat, kappa_hat2 = matched_constants(params.kappa, h)
    q_hat = graph_laplacian_precision(mesh, math.sqrt(kappa_hat2), 1).matrix
    q = alpha1_vertex_precision(mesh, params).matrix
    scale = 2.0 * params.kappa * params.tau**2
    return mesh, (c_hat * q_hat - q / scale).tocsr()


def subdivision_convergence(graph: MetricGraph, params: ModelParams, h_grid: Sequence[float]) -> list[SubdivisionRow]:
    """max |Sigma - Sigma_hat| over the original vertices for each mesh width."""
    _check_alpha1(params)
    n = graph.n_vertices
    exact = np.linalg.inv(alpha1_vertex_precision(graph, params).toarray())
    scale = 2.0 * params.kappa * params.tau**2

    rows = []
    for h in h_grid:
        mesh = subdivide(graph, h)
        c_hat, kappa_hat2 = matched_constants(params.kappa, h)
        q_hat = graph_laplacian_precision(mesh, math.sqrt(kappa_hat2), 1)
        unit = sp.csc_matrix((np.ones(n), (np.arange(n), np.arange(n))), shape=(mesh.n_vertices, n))
        approx = q_hat.solve(unit)[:n] / (scale * c_hat)
        error = float(np.max(np.abs(exact - approx)))
        rows.append(SubdivisionRow(h=float(h), max_abs_error=error))
        logger.info(f"Subdivision h={h:.6g}: {mesh.n_vertices} vertices, max error {error:.6g}")
    return rows


def sherman_morrison_gap(graph: MetricGraph, params: ModelParams, h: float) -> float:
    """max |(Sigma - Sigma_hat) - s Sigma_i Sigma_i^T / (1 + s Sigma_ii)| for one defect vertex i.

    Requires exactly one vertex of degree other than 2; s = 2 kappa tau^2 times the defect.
    """
    mesh, defect = laplacian_defect(graph, params, h)
    odd = np.flatnonzero(mesh.degrees != 2)
    if odd.size != 1:
        raise InvalidParameterError(
            f"need exactly one vertex of degree other than 2, found {odd.size}", field="graph"
        )
    i = int(odd[0])
    scale = 2.0 * params.kappa * params.tau**2
    c_hat, kappa_hat2 = matched_constants(params.kappa, h)

    sigma = np.linalg.inv(alpha1_vertex_precision(mesh, params).toarray())
    sigma_hat = np.linalg.inv(graph_laplacian_precision(mesh, math.sqrt(kappa_hat2), 1).toarray()) / (scale * c_hat)
    s = scale * defect[i, i]
    predicted = s * np.outer(sigma[:, i], sigma[:, i]) / (1.0 + s * sigma[i, i])
    return float(np.max(np.abs((sigma - sigma_hat) - predicted)))


def unit_variance_tau2(kappa: float) -> float:
    """tau^2 with 2 kappa tau^2 = 1."""
    return 1.0 / (2.0 * kappa)


def kappa_zero_limit_check(
    graph: MetricGraph,
    kappas: Sequence[float],
    tau2_rule: Callable[[float], float] = unit_variance_tau2,
) -> list[KappaLimitRow]:
    """max |2 kappa Q - L_w| with L_w the Laplacian weighted by 1 / length."""
    if graph.has_loops:
        raise InvalidParameterError("the kappa -> 0 limit is stated for graphs without loops", field="graph")
    weighted = laplacian(graph, np.array([1.0 / edge.length for edge in graph.edges])).toarray()
    rows = []
    for kappa in kappas:
        params = ModelParams(alpha=1, kappa=kappa, tau=math.sqrt(tau2_rule(kappa)))
        q = alpha1_vertex_precision(graph, params).toarray()
        rows.append(KappaLimitRow(kappa=float(kappa), max_abs_error=float(np.max(np.abs(2.0 * kappa * q - weighted)))))
    return rows

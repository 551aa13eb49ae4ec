"""Kirchhoff vertex constraints K U = b on the stacked endpoint vector and the per-vertex
orthogonal change of basis that makes them act on a leading block of coordinates."""

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.linalg import qr, solve_triangular

from graph_matern.core.exceptions import (
    InvalidObservationError,
    InvalidParameterError,
    NumericalError,
    RankDeficientConstraintsError,
)
from graph_matern.core.logging_config import get_logger
from graph_matern.core.settings import settings
from graph_matern.graph.metric_graph import START, MetricGraph
from graph_matern.models.params import BoundaryMode, ModelParams
from graph_matern.precision.assembly import DofIndex, stationary_vertices

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class LocalConstraints:
    """Constraint rows of one (vertex, derivative order) group on that group's dofs."""

    vertex: int
    order: int
    dofs: np.ndarray
    rows: np.ndarray

    @property
    def n_constraints(self) -> int:
        return int(self.rows.shape[0])


@dataclass(frozen=True, eq=False)
class ChangeOfBasis:
    """Orthogonal T with constrained coordinates first.

    ``vertex_coordinate[v]`` is the position, within the unconstrained block, of the single
    coordinate that carries the value of vertex v; ``vertex_scale[v]`` is its weight.
    """

    T: sp.csr_matrix
    k: int
    r_factors: tuple[np.ndarray, ...]
    vertex_coordinate: np.ndarray
    vertex_scale: np.ndarray

    @cached_property
    def T_C(self) -> sp.csr_matrix:
        return self.T[: self.k]

    @cached_property
    def T_U(self) -> sp.csr_matrix:
        return self.T[self.k :]


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """Constraint matrix K, vertex selector A and change of basis over a DofIndex."""

    graph: MetricGraph
    dofs: DofIndex
    K: sp.csr_matrix
    A: sp.csr_matrix
    groups: tuple[LocalConstraints, ...]

    @property
    def k(self) -> int:
        return int(self.K.shape[0])

    @property
    def n(self) -> int:
        return self.dofs.size

    @cached_property
    def basis(self) -> ChangeOfBasis:
        return change_of_basis(self)

    @property
    def T(self) -> sp.csr_matrix:
        return self.basis.T

    def transform_rhs(self, b: np.ndarray | None) -> np.ndarray:
        """b* with T_C U = b* equivalent to K U = b."""
        if b is None:
            return np.zeros(self.k)
        b = np.asarray(b, dtype=float)
        if b.shape != (self.k,):
            raise InvalidObservationError(f"constraint right-hand side must have length {self.k}")
        out = np.empty(self.k)
        start = 0
        for r_factor in self.basis.r_factors:
            r = r_factor.shape[0]
            out[start : start + r] = solve_triangular(r_factor, b[start : start + r], trans="T")
            start += r
        return out


def build_constraints(graph: MetricGraph, params: ModelParams) -> ConstraintSystem:
    """Continuity of values and zero sum of outward derivatives at every vertex.

    Half-edges at a vertex are ordered by (edge, side). Values give d - 1 rows
    u_{h_i} - u_{h_{i+1}}; for alpha = 2 derivatives give one row with +u' at edge starts and
    -u' at edge ends. Stationary degree-1 vertices carry no rows.
    """
    if params.alpha > 1 and graph.has_loops:
        raise InvalidParameterError("loops must be split before building constraints when alpha = 2")

    dofs = DofIndex(params.alpha, graph.n_edges)
    stationary = stationary_vertices(graph, params)
    groups: list[LocalConstraints] = []

    for v, halves in enumerate(graph.incidence):
        d = len(halves)
        for order in range(params.alpha):
            group_dofs = np.array([dofs.dof(h.edge, h.side, order) for h in halves], dtype=int)
            if v in stationary or (order == 0 and d == 1):
                rows = np.zeros((0, d))
            elif order == 0:
                rows = np.zeros((d - 1, d))
                idx = np.arange(d - 1)
                rows[idx, idx] = 1.0
                rows[idx, idx + 1] = -1.0
            else:
                rows = np.array([[1.0 if h.side == START else -1.0 for h in halves]])
            groups.append(LocalConstraints(v, order, group_dofs, rows))

    data, row_idx, col_idx = [], [], []
    k = 0
    for group in groups:
        local = sp.coo_matrix(group.rows)
        data.extend(local.data)
        row_idx.extend(local.row + k)
        col_idx.extend(group.dofs[local.col])
        k += group.n_constraints
    K = sp.csr_matrix((data, (row_idx, col_idx)), shape=(k, dofs.size))

    first = [dofs.dof(halves[0].edge, halves[0].side, 0) for halves in graph.incidence]
    A = sp.csr_matrix(
        (np.ones(graph.n_vertices), (np.arange(graph.n_vertices), first)),
        shape=(graph.n_vertices, dofs.size),
    )

    logger.debug(f"Built {k} constraints on {dofs.size} dofs for {graph.n_vertices} vertices")
    return ConstraintSystem(graph, dofs, K, A, tuple(groups))


def change_of_basis(constraints: ConstraintSystem) -> ChangeOfBasis:
    """Orthonormalize each group's constraint rows and complete them to a basis of the group.

    For a group with rows C (r x d), the full QR factorization C^T = Q R gives the constrained
    coordinates Q_1^T (first r columns) and the free coordinates Q_2^T. Groups without rows
    pass their dofs through unchanged.
    """
    n = constraints.n
    k = constraints.k
    graph = constraints.graph

    c_entries: list[tuple[int, int, float]] = []
    u_entries: list[tuple[int, int, float]] = []
    r_factors: list[np.ndarray] = []
    c_row = 0
    u_row = 0
    coordinate = np.full(graph.n_vertices, -1, dtype=int)
    scale = np.zeros(graph.n_vertices)

    for group in constraints.groups:
        d = group.dofs.size
        r = group.n_constraints
        if r == 0:
            basis = np.eye(d)
        else:
            q, r_full = qr(group.rows.T)
            r_factor = r_full[:r, :r]
            pivots = np.abs(np.diag(r_factor))
            if np.any(pivots < settings.RANK_TOL * max(1.0, float(np.abs(group.rows).max()))):
                raise RankDeficientConstraintsError(graph.vertex_ids[group.vertex], group.order)
            r_factors.append(r_factor)
            basis = q
            for i in range(r):
                for j in range(d):
                    if basis[j, i] != 0.0:
                        c_entries.append((c_row + i, int(group.dofs[j]), float(basis[j, i])))
            c_row += r

        for i in range(r, d):
            column = basis[:, i]
            for j in range(d):
                if column[j] != 0.0:
                    u_entries.append((u_row, int(group.dofs[j]), float(column[j])))
            if group.order == 0 and abs(column[0]) > 1e-12:
                if coordinate[group.vertex] >= 0:
                    raise NumericalError(f"vertex {graph.vertex_ids[group.vertex]} value is not a single coordinate")
                coordinate[group.vertex] = u_row
                scale[group.vertex] = column[0]
            u_row += 1

    if c_row != k or c_row + u_row != n or np.any(coordinate < 0):
        raise NumericalError("change of basis is incomplete")

    entries = c_entries + [(k + i, j, v) for i, j, v in u_entries]
    rows, cols, vals = zip(*entries, strict=True) if entries else ((), (), ())
    T = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return ChangeOfBasis(T, k, tuple(r_factors), coordinate, scale)


def cached_constraints(graph: MetricGraph, params: ModelParams) -> ConstraintSystem:
    """build_constraints shared across parameter values with the same alpha and boundary modes."""
    overrides = tuple(sorted(params.boundary_overrides.items()))
    return _constraints_for(graph, params.alpha, params.boundary, overrides)


@lru_cache(maxsize=64)
def _constraints_for(
    graph: MetricGraph, alpha: int, boundary: BoundaryMode, overrides: tuple[tuple[str, BoundaryMode], ...]
) -> ConstraintSystem:
    params = ModelParams(alpha=alpha, kappa=1.0, tau=1.0, boundary=boundary, boundary_overrides=dict(overrides))
    return build_constraints(graph, params)


def clear_constraint_cache() -> None:
    _constraints_for.cache_clear()

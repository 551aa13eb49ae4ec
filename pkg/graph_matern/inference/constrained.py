"""Gaussian vectors with a block-diagonal precision conditioned on linear constraints K U = b.

After the change of basis U* = T U the constraints fix the leading k coordinates, so every
operation works with the free block of T Q T^T, which stays sparse.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from graph_matern.core.exceptions import InvalidObservationError, SingularSystemError
from graph_matern.core.logging_config import get_logger
from graph_matern.graph.metric_graph import MetricGraph
from graph_matern.inference.covariance import BlockDiagonalCovariance
from graph_matern.inference.gaussian import canonical_update, schur_marginal_loglik
from graph_matern.models.params import ModelParams
from graph_matern.precision.assembly import BlockPrecision, assemble_block_precision
from graph_matern.precision.constraints import ChangeOfBasis, ConstraintSystem, cached_constraints
from graph_matern.precision.factor import SparseCholesky

logger = get_logger(__name__)


class ConstrainedGaussian:
    """U ~ N(0, Q^{-1}) conditioned on K U = b, in the rotated coordinates."""

    def __init__(self, precision: BlockPrecision, constraints: ConstraintSystem):
        if precision.dofs != constraints.dofs:
            raise SingularSystemError("constrained model", "precision and constraints disagree on the dof layout")
        self.precision = precision
        self.constraints = constraints
        k = constraints.k
        rotated = (constraints.T @ precision.matrix.matrix @ constraints.T.T).tocsc()
        self.Q_UU = rotated[k:, k:].tocsc()
        self.Q_UC = rotated[k:, :k].tocsc()
        logger.debug(f"Constrained model: {self.n} dofs, {k} constraints, {self.Q_UU.nnz} non-zeros in Q_UU")

    @property
    def basis(self) -> ChangeOfBasis:
        return self.constraints.basis

    @property
    def n(self) -> int:
        return self.constraints.n

    @property
    def n_free(self) -> int:
        return self.n - self.constraints.k

    @cached_property
    def free_factor(self) -> SparseCholesky:
        return SparseCholesky(self.Q_UU, "constrained precision")

    def free_mean(self, b: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
        """(b*, E[U_free | K U = b])."""
        b_star = self.constraints.transform_rhs(b)
        if not np.any(b_star):
            return b_star, np.zeros(self.n_free)
        return b_star, -self.free_factor.solve(self.Q_UC @ b_star)

    def to_dofs(self, b_star: np.ndarray, free: np.ndarray) -> np.ndarray:
        """U = T_C^T b* + T_U^T w for a free vector (or columns of free vectors)."""
        fixed = self.basis.T_C.T @ b_star
        if free.ndim == 2:
            return self.basis.T_U.T @ free + fixed[:, None]
        return self.basis.T_U.T @ free + fixed

    def mean(self, b: np.ndarray | None = None) -> np.ndarray:
        b_star, mu = self.free_mean(b)
        return self.to_dofs(b_star, mu)

    def vertex_offset(self, b_star: np.ndarray) -> np.ndarray:
        """Contribution of the fixed coordinates to each vertex value."""
        return self.constraints.A @ (self.basis.T_C.T @ b_star)


@dataclass(frozen=True, eq=False)
class ConstrainedPosterior:
    """Gaussian over the free coordinates, some of which may be pinned by exact observations."""

    model: ConstrainedGaussian
    b_star: np.ndarray
    mean_free: np.ndarray
    random: np.ndarray
    factor: SparseCholesky
    precision_random: sp.csc_matrix
    loglik: float

    @cached_property
    def mean(self) -> np.ndarray:
        """Posterior mean of the stacked endpoint vector."""
        return self.model.to_dofs(self.b_star, self.mean_free)

    @property
    def precision(self) -> sp.csr_matrix:
        """Posterior precision on the stacked endpoint vector (singular along pinned directions)."""
        t_random = self.model.basis.T_U[self.random]
        return (t_random.T @ self.precision_random @ t_random).tocsr()

    def _project(self, A: sp.spmatrix | np.ndarray) -> np.ndarray:
        A = sp.csr_matrix(A)
        return (self.model.basis.T_U @ A.T).tocsr()[self.random].toarray()

    def covariance(self, A: sp.spmatrix | np.ndarray) -> np.ndarray:
        """A Cov(U | data) A^T."""
        g = self._project(A)
        out = g.T @ self.factor.solve(g)
        return 0.5 * (out + out.T)

    def variances(self, A: sp.spmatrix | np.ndarray, chunk: int = 256) -> np.ndarray:
        """diag(A Cov(U | data) A^T), in column chunks."""
        A = sp.csr_matrix(A)
        out = np.empty(A.shape[0])
        for start in range(0, A.shape[0], chunk):
            g = self._project(A[start : start + chunk])
            out[start : start + chunk] = np.einsum("ij,ij->j", g, self.factor.solve(g))
        return np.maximum(out, 0.0)


def constrained_covariance(model: ConstrainedGaussian, A: sp.spmatrix | np.ndarray | None = None) -> np.ndarray:
    """A Cov(U | K U = b) A^T from the unconstrained precision.

    With X = Q^{-1} A^T, W = Q^{-1} K^T and S = K W this is A X - (A W) S^{-1} (K X).
    """
    q = model.precision.matrix
    K = model.constraints.K
    A = sp.identity(model.n, format="csr") if A is None else sp.csr_matrix(A)
    X = q.solve(A.T.toarray())
    sigma = A @ X
    if model.constraints.k:
        W = q.solve(K.T.toarray())
        S = K @ W
        try:
            s_factor = cho_factor(0.5 * (S + S.T), lower=True)
        except LinAlgError as e:
            raise SingularSystemError("constraint covariance", str(e)) from e
        sigma = sigma - (A @ W) @ cho_solve(s_factor, K @ X)
    sigma = np.asarray(sigma)
    return 0.5 * (sigma + sigma.T)


def sample_constrained(
    model: ConstrainedGaussian,
    rng: np.random.Generator | int | None = None,
    n_samples: int = 1,
    b: np.ndarray | None = None,
    A: sp.spmatrix | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Draws of U given K U = b: returns (A U, U) with one row per sample.

    w = T_U L z has covariance Q_UU when L L^T = Q, so Q_UU^{-1} w has covariance Q_UU^{-1}.
    A defaults to the vertex-value selector.
    """
    rng = np.random.default_rng(rng)
    b_star, mu = model.free_mean(b)
    z = rng.standard_normal((model.n, n_samples))
    w = model.basis.T_U @ (model.precision.cholesky_factor @ z)
    free = mu[:, None] + model.free_factor.solve(w)
    draws = np.asarray(model.to_dofs(b_star, free)).T
    selector = model.constraints.A if A is None else sp.csr_matrix(A)
    return np.asarray((selector @ draws.T).T), draws


def _check_design(model: ConstrainedGaussian, design: sp.spmatrix, noise: BlockDiagonalCovariance, y: np.ndarray):
    if design.shape != (y.size, model.n) or noise.size != y.size:
        raise InvalidObservationError(
            f"design {design.shape}, noise of size {noise.size} and {y.size} observations do not match"
        )


def _gaussian_update(
    model: ConstrainedGaussian,
    design: sp.spmatrix,
    noise: BlockDiagonalCovariance,
    y: np.ndarray,
    b: np.ndarray | None,
) -> ConstrainedPosterior:
    """Condition the free coordinates on y = B U + e, e ~ N(0, Sigma)."""
    y = np.asarray(y, dtype=float)
    design = sp.csr_matrix(design)
    _check_design(model, design, noise, y)

    b_star, mu = model.free_mean(b)
    residual = y - design @ (model.basis.T_C.T @ b_star)
    update = canonical_update(model.Q_UU, model.free_factor, mu, design @ model.basis.T_U.T, noise, residual)
    return ConstrainedPosterior(
        model, b_star, update.mean, np.arange(model.n_free), update.factor, update.precision, update.loglik
    )


def prior_posterior(model: ConstrainedGaussian, b: np.ndarray | None = None) -> ConstrainedPosterior:
    """The constrained prior in posterior form (no data)."""
    b_star, mu = model.free_mean(b)
    return ConstrainedPosterior(model, b_star, mu, np.arange(model.n_free), model.free_factor, model.Q_UU, 0.0)


def density_y_given_constraints(
    model: ConstrainedGaussian,
    design: sp.spmatrix,
    noise: BlockDiagonalCovariance,
    y: np.ndarray,
    b: np.ndarray | None = None,
) -> float:
    """log p(y | K U = b) for y = B U + e."""
    return _gaussian_update(model, design, noise, y, b).loglik


def posterior_u(
    model: ConstrainedGaussian,
    design: sp.spmatrix,
    noise: BlockDiagonalCovariance,
    y: np.ndarray,
    b: np.ndarray | None = None,
) -> ConstrainedPosterior:
    """U | y, K U = b."""
    return _gaussian_update(model, design, noise, y, b)


def condition_on_vertices(
    model: ConstrainedGaussian,
    vertices: np.ndarray,
    values: np.ndarray,
    b: np.ndarray | None = None,
) -> ConstrainedPosterior:
    """Condition on exact vertex values u(v_i) = y_i.

    Each vertex value is one free coordinate times vertex_scale, so exact observations pin
    coordinates and the rest follows from the Schur complement of Q_UU.
    """
    vertices = np.asarray(vertices, dtype=int)
    values = np.asarray(values, dtype=float)
    coordinates = model.basis.vertex_coordinate[vertices]
    if np.unique(coordinates).size != coordinates.size:
        raise InvalidObservationError("exact observations require distinct locations", field="locations")
    scales = model.basis.vertex_scale[vertices]

    b_star, mu = model.free_mean(b)
    pinned = (values - model.vertex_offset(b_star)[vertices]) / scales
    loglik, remaining, conditional, factor = schur_marginal_loglik(
        model.Q_UU, model.free_factor, mu, coordinates, pinned
    )
    loglik -= float(np.sum(np.log(np.abs(scales))))

    mean_free = mu.copy()
    mean_free[coordinates] = pinned
    mean_free[remaining] = conditional
    q_rr = model.Q_UU[remaining][:, remaining].tocsc()
    return ConstrainedPosterior(model, b_star, mean_free, remaining, factor, q_rr, loglik)


def build_model(graph: MetricGraph, params: ModelParams) -> ConstrainedGaussian:
    """Boundaryless block precision plus Kirchhoff constraints for a graph."""
    return ConstrainedGaussian(assemble_block_precision(graph, params), cached_constraints(graph, params))

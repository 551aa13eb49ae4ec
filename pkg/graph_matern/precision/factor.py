"""Sparse symmetric positive-definite matrices and their CHOLMOD factorization."""

from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from sksparse.cholmod import CholmodError, CholmodNotPositiveDefiniteError, cholesky

from graph_matern.core.exceptions import NotPositiveDefiniteError, NumericalError
from graph_matern.core.logging_config import get_logger
from graph_matern.core.settings import settings

logger = get_logger(__name__)


class SparseCholesky:
    """Factorization of a sparse SPD matrix exposing solve and log-determinant."""

    def __init__(self, matrix: sp.spmatrix, what: str = "precision matrix"):
        self.what = what
        csc = sp.csc_matrix(matrix, dtype=float)
        self.shape = csc.shape
        if csc.shape[0] == 0:
            self._factor = None
            self.logdet = 0.0
            return

        try:
            factor = cholesky(csc)
        except CholmodNotPositiveDefiniteError as e:
            raise NotPositiveDefiniteError(what, str(e)) from e
        except CholmodError as e:
            raise NumericalError(f"factorization of {what} failed: {e}") from e

        pivots = factor.D()
        if not np.all(np.isfinite(pivots)) or np.any(pivots <= 0):
            raise NotPositiveDefiniteError(what, "non-positive pivot")
        logger.debug(f"Factored {what}: n={csc.shape[0]}, nnz={csc.nnz}")

        self._factor = factor
        self.logdet = float(factor.logdet())

    def solve(self, rhs: np.ndarray | sp.spmatrix) -> np.ndarray:
        """Solve A x = rhs for a vector or a matrix of right-hand sides."""
        if sp.issparse(rhs):
            rhs = rhs.toarray()
        rhs = np.asarray(rhs, dtype=float)
        if self._factor is None:
            return np.zeros_like(rhs)
        return np.asarray(self._factor(rhs))

    def inv_quad(self, v: np.ndarray) -> float:
        """v^T A^{-1} v."""
        return float(v @ self.solve(v))


class SparseSymMatrix:
    """Symmetric sparse matrix with a positive-definite factorization contract."""

    def __init__(self, matrix: sp.spmatrix | np.ndarray, what: str = "precision matrix"):
        self.matrix = sp.csc_matrix(matrix, dtype=float)
        self.what = what
        if self.matrix.shape[0] != self.matrix.shape[1]:
            raise NumericalError(f"{what} is not square: {self.matrix.shape}")
        asym = abs(self.matrix - self.matrix.T)
        scale = abs(self.matrix).max() if self.matrix.nnz else 0.0
        if asym.nnz and asym.max() > 1e-10 * max(scale, 1.0):
            raise NumericalError(f"{what} is not symmetric (max asymmetry {asym.max():.3e})")

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    @cached_property
    def factor(self) -> SparseCholesky:
        return SparseCholesky(self.matrix, self.what)

    def solve(self, rhs: np.ndarray | sp.spmatrix) -> np.ndarray:
        return self.factor.solve(rhs)

    def logdet(self) -> float:
        return self.factor.logdet

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def write_coordinate(self, path: str | Path) -> None:
        """Dump non-zeros as `row col value` lines at full precision."""
        coo = self.matrix.tocoo()
        digits = settings.CSV_DIGITS
        with open(path, "w", encoding="utf-8") as handle:
            for i, j, v in zip(coo.row, coo.col, coo.data, strict=True):
                handle.write(f"{i} {j} {v:.{digits}g}\n")
        logger.info(f"Wrote {coo.nnz} non-zeros of {self.what} to {path}")

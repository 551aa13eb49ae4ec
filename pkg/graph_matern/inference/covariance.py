"""Block-diagonal observation covariance with dense Cholesky per block."""

import math
from collections.abc import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import LinAlgError, cholesky, solve_triangular

from graph_matern.core.exceptions import NotPositiveDefiniteError


class BlockDiagonalCovariance:
    """Covariance of n observations made of dense blocks on disjoint index sets."""

    def __init__(
        self,
        size: int,
        blocks: Sequence[tuple[np.ndarray, np.ndarray]],
        what: str = "observation covariance",
    ):
        self.size = size
        self.what = what
        self._diag_sd: np.ndarray | None = None
        self._blocks: list[tuple[np.ndarray, np.ndarray]] = []
        covered = np.zeros(size, dtype=bool)
        for index, block in blocks:
            index = np.asarray(index, dtype=int)
            if index.size == 0:
                continue
            try:
                factor = cholesky(np.atleast_2d(block), lower=True)
            except LinAlgError as e:
                raise NotPositiveDefiniteError(what, str(e)) from e
            if np.any(np.diag(factor) <= 0):
                raise NotPositiveDefiniteError(what, "zero variance")
            covered[index] = True
            self._blocks.append((index, factor))
        if not np.all(covered):
            raise NotPositiveDefiniteError(what, "observations without a covariance block")

    @classmethod
    def diagonal(cls, variances: np.ndarray, what: str = "observation covariance") -> "BlockDiagonalCovariance":
        variances = np.asarray(variances, dtype=float)
        if np.any(variances <= 0):
            raise NotPositiveDefiniteError(what, "non-positive variance")
        out = cls.__new__(cls)
        out.size = variances.size
        out.what = what
        out._blocks = []
        out._diag_sd = np.sqrt(variances)
        return out

    @property
    def _is_diagonal(self) -> bool:
        return self._diag_sd is not None

    def logdet(self) -> float:
        if self._is_diagonal:
            return float(2.0 * np.sum(np.log(self._diag_sd)))
        return float(sum(2.0 * np.sum(np.log(np.diag(f))) for _, f in self._blocks))

    def whiten(self, v: np.ndarray) -> np.ndarray:
        """L^{-1} v with L the block Cholesky factor (rows or row-stacked columns)."""
        v = np.asarray(v, dtype=float)
        if self._is_diagonal:
            return v / (self._diag_sd if v.ndim == 1 else self._diag_sd[:, None])
        out = np.empty_like(v)
        for index, factor in self._blocks:
            out[index] = solve_triangular(factor, v[index], lower=True)
        return out

    def whiten_matrix(self, design: sp.spmatrix) -> sp.csr_matrix:
        """L^{-1} B keeping B sparse."""
        design = sp.csr_matrix(design)
        if self._is_diagonal:
            return sp.diags(1.0 / self._diag_sd) @ design
        pieces = []
        for index, factor in self._blocks:
            rows = design[index]
            cols = np.unique(rows.indices)
            dense = solve_triangular(factor, rows[:, cols].toarray(), lower=True)
            coo = sp.coo_matrix(dense)
            pieces.append((index[coo.row], cols[coo.col], coo.data))
        if not pieces:
            return sp.csr_matrix(design.shape)
        r = np.concatenate([p[0] for p in pieces])
        c = np.concatenate([p[1] for p in pieces])
        d = np.concatenate([p[2] for p in pieces])
        return sp.csr_matrix((d, (r, c)), shape=design.shape)

    def solve(self, v: np.ndarray) -> np.ndarray:
        """Sigma^{-1} v."""
        if self._is_diagonal:
            sd = self._diag_sd if np.ndim(v) == 1 else self._diag_sd[:, None]
            return np.asarray(v, dtype=float) / sd**2
        out = np.empty_like(np.asarray(v, dtype=float))
        for index, factor in self._blocks:
            z = solve_triangular(factor, np.asarray(v, dtype=float)[index], lower=True)
            out[index] = solve_triangular(factor, z, lower=True, trans="T")
        return out

    def log_normalizer(self) -> float:
        """-(n/2) log(2 pi) - (1/2) log |Sigma|."""
        return -0.5 * self.size * math.log(2.0 * math.pi) - 0.5 * self.logdet()

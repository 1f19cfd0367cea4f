"""Sparse and periodic-banded linear solves for the Picard iterations.

Unknowns are interleaved per node as ``(x_i, y_i, V_i, kappa_i)``. The
nearest-neighbour stencils give a block-tridiagonal matrix with periodic
corner blocks. Reordering the nodes as ``0, M-1, 1, M-2, ...`` folds the
corners into the band, so a pivoted LAPACK band solver handles the whole
system with ``kl = ku = 11``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import lapack
from scipy.sparse.linalg import splu

NVAR = 4
BANDWIDTH = 2 * NVAR + NVAR - 1
RESIDUAL_RTOL = 1e-10
PIVOT_RTOL = 1e-15


class SingularSystemError(ArithmeticError):
    """Raised for singular or numerically rank-deficient matrices."""

    def __init__(self, message: str, pivot: float):
        super().__init__(f"{message} (pivot magnitude {pivot:.3e})")
        self.pivot = pivot


@dataclass
class SparseSystem:
    """Square sparse system stored as coordinate triplets."""

    dimension: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.int64)
        self.cols = np.asarray(self.cols, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        n = self.dimension
        if self.rhs.shape != (n,):
            raise ValueError(f"rhs must have length {n}")
        if len(self.rows) and (self.rows.min() < 0 or self.rows.max() >= n
                               or self.cols.min() < 0 or self.cols.max() >= n):
            raise ValueError("entry index out of range")
        if not (np.all(np.isfinite(self.values)) and np.all(np.isfinite(self.rhs))):
            raise ValueError("non-finite entries")

    @classmethod
    def from_dense(cls, A, b) -> "SparseSystem":
        A = np.asarray(A, dtype=float)
        r, c = np.nonzero(A)
        return cls(A.shape[0], r, c, A[r, c], b)

    def matrix(self) -> sp.csc_matrix:
        n = self.dimension
        return sp.coo_matrix((self.values, (self.rows, self.cols)), shape=(n, n)).tocsc()


def _check_residual(A, u, b) -> float:
    return float(np.max(np.abs(A @ u - b), initial=0.0))


def solve(system: SparseSystem) -> np.ndarray:
    """Direct sparse LU solve with one step of iterative refinement if needed.

    The result satisfies ``|A u - b|_inf <= 1e-10 (1 + |b|_inf)``.
    """
    A = system.matrix()
    b = system.rhs
    if A.nnz == 0:
        raise SingularSystemError("zero matrix", 0.0)
    try:
        lu = splu(A)
    except RuntimeError as exc:
        raise SingularSystemError(f"factorization failed: {exc}", 0.0) from None
    piv = np.abs(lu.U.diagonal())
    scale = max(float(np.abs(A).max()), 1.0)
    if piv.min() <= PIVOT_RTOL * scale * system.dimension:
        raise SingularSystemError("numerically rank-deficient matrix", float(piv.min()))
    u = lu.solve(b)
    bound = RESIDUAL_RTOL * (1.0 + float(np.max(np.abs(b), initial=0.0)))
    if _check_residual(A, u, b) > bound:
        u = u + lu.solve(b - A @ u)
    res = _check_residual(A, u, b)
    if not np.isfinite(res) or res > bound:
        raise SingularSystemError(f"residual {res:.3e} exceeds {bound:.3e}", float(piv.min()))
    return u


def fold_positions(M: int) -> np.ndarray:
    """Band position of each node under the folded ordering ``0, M-1, 1, M-2, ...``."""
    i = np.arange(M)
    return np.where(2 * i < M, 2 * i, 2 * (M - 1 - i) + 1)


def unknown_positions(M: int) -> np.ndarray:
    """Folded position of each interleaved unknown ``4 i + c``."""
    return (NVAR * fold_positions(M)[:, None] + np.arange(NVAR)[None, :]).ravel()


def to_band(system: SparseSystem, kl: int = BANDWIDTH, ku: int = BANDWIDTH):
    """Permute ``system`` to folded order and pack it in LAPACK ``gbsv`` layout."""
    n = system.dimension
    pos = unknown_positions(n // NVAR)
    pr, pc = pos[system.rows], pos[system.cols]
    if np.any(np.abs(pr - pc) > max(kl, ku)):
        raise ValueError("entry outside the folded band")
    ab = np.zeros((2 * kl + ku + 1, n), order="F")
    ab[kl + ku + pr - pc, pc] = system.values
    b = np.empty(n)
    b[pos] = system.rhs
    return ab, b, pos


def solve_band(ab, b, kl: int = BANDWIDTH, ku: int = BANDWIDTH) -> np.ndarray:
    """Pivoted band LU solve; ``ab`` is overwritten with the factors."""
    lub, piv, x, info = lapack.dgbsv(kl, ku, ab, b, overwrite_ab=True, overwrite_b=True)
    if info > 0:
        raise SingularSystemError(f"zero pivot in column {info}", 0.0)
    if info < 0:
        raise ValueError(f"illegal argument {-info} to dgbsv")
    diag = np.abs(lub[kl + ku])
    if diag.min() <= PIVOT_RTOL * diag.max() * len(diag):
        raise SingularSystemError("numerically rank-deficient band matrix", float(diag.min()))
    return x


def solve_periodic(system: SparseSystem) -> np.ndarray:
    """Solve a nearest-neighbour periodic system through the folded band."""
    ab, b, pos = to_band(system)
    return solve_band(ab, b)[pos]

"""Dense linear-algebra kernels shared by the solver and analysis modules.

Everything operates on plain float64 numpy arrays at desk scale (a few
hundred rows); matrices are always materialized densely.  The routines here
wrap LAPACK through numpy/scipy and add the dimension, symmetry, and
definiteness checks the callers rely on.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.linalg import cho_solve
from scipy.linalg.lapack import dpotrf

__all__ = [
    "EigenConvergenceError",
    "LinearMap",
    "NotPositiveDefiniteError",
    "NotPsdError",
    "SpdFactor",
    "eig_all",
    "eig_pairs",
    "seminorm",
    "spd_factor",
    "spd_solve",
]

# Relative tolerance used to accept a matrix as symmetric.
SYMMETRY_RTOL = 1e-10
# Quadratic forms down to -PSD_CLAMP * ||u||^2 are treated as roundoff.
PSD_CLAMP = 1e-12
# Guard against accidentally feeding the dense eigensolver a huge matrix.
EIG_MAX_DIM = 500


class NotPositiveDefiniteError(ValueError):
    """Cholesky pivot failure; ``pivot`` is the 0-based index that failed."""

    def __init__(self, pivot: int):
        super().__init__(
            f"matrix is not positive definite (nonpositive pivot at index {pivot})"
        )
        self.pivot = pivot


class NotPsdError(ValueError):
    """A quadratic form came out negative beyond roundoff."""


class EigenConvergenceError(RuntimeError):
    """The QR eigenvalue iteration failed to converge."""


def _square(mat, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(mat, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class SpdFactor:
    """Lower-triangular Cholesky factor of a symmetric positive definite matrix.

    ``fingerprint`` tags the scalar parameter the factored matrix was built
    from (the solver uses the stepsize product t*s), so a caller holding a
    cached factor can tell whether it is still valid.
    """

    dim: int
    lower: np.ndarray
    fingerprint: float = float("nan")


def spd_factor(s_mat, fingerprint: float = float("nan")) -> SpdFactor:
    """Cholesky-factor a symmetric positive definite matrix.

    Parameters
    ----------
    s_mat : (d, d) array_like
        Symmetric (to relative 1e-10) positive definite matrix.
    fingerprint : float, optional
        Scalar recorded on the factor for cache-validity checks.

    Returns
    -------
    SpdFactor
        Factor with ``lower @ lower.T`` reproducing ``s_mat`` to relative
        1e-12.

    Raises
    ------
    NotPositiveDefiniteError
        If a pivot is nonpositive; carries the failing 0-based index.
    ValueError
        If the input is not square or not symmetric.
    """
    s = _square(s_mat)
    scale = float(np.abs(s).max()) if s.size else 0.0
    if scale > 0.0 and float(np.abs(s - s.T).max()) > SYMMETRY_RTOL * scale:
        raise ValueError("matrix is not symmetric")
    c, info = dpotrf(s, lower=1, clean=1)
    if info > 0:
        raise NotPositiveDefiniteError(info - 1)
    if info < 0:
        raise ValueError(f"illegal value in argument {-info} of Cholesky call")
    return SpdFactor(dim=s.shape[0], lower=c, fingerprint=float(fingerprint))


def spd_solve(factor: SpdFactor, rhs) -> np.ndarray:
    """Solve S x = rhs given the Cholesky factor of S."""
    b = np.asarray(rhs, dtype=float)
    if b.shape != (factor.dim,):
        raise ValueError(
            f"dimension mismatch: factor is {factor.dim}, rhs has shape {b.shape}"
        )
    return cho_solve((factor.lower, True), b)


def eig_pairs(mat) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a dense real square matrix.

    Returns the complex eigenvalue vector and the matrix whose columns are
    the matching (unit-norm) eigenvectors.
    """
    a = _square(mat)
    if a.shape[0] > EIG_MAX_DIM:
        raise ValueError(
            f"matrix dimension {a.shape[0]} exceeds the supported {EIG_MAX_DIM}"
        )
    try:
        vals, vecs = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"eigenvalue iteration failed: {exc}") from exc
    return vals.astype(complex), vecs.astype(complex)


def eig_all(mat) -> np.ndarray:
    """All eigenvalues of a dense real square matrix, as a complex vector."""
    vals, _ = eig_pairs(mat)
    return vals


def seminorm(u, mat) -> float:
    """Seminorm sqrt(<M u, u>) induced by a symmetric PSD matrix M.

    Accepts real or complex ``u`` (the pairing is conjugate-bilinear).  Tiny
    negative quadratic forms, down to -1e-12 * ||u||^2, are clamped to zero;
    anything below that raises :class:`NotPsdError`.
    """
    vec = np.asarray(u)
    m = np.asarray(mat, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"metric must be square, got shape {m.shape}")
    if vec.shape != (m.shape[0],):
        raise ValueError(
            f"dimension mismatch: metric is {m.shape[0]}, vector has shape {vec.shape}"
        )
    quad = float(np.real(np.vdot(vec, m @ vec)))
    sq = float(np.real(np.vdot(vec, vec)))
    if quad < -PSD_CLAMP * sq:
        raise NotPsdError(f"metric is not positive semidefinite: <Mu,u> = {quad}")
    return math.sqrt(max(quad, 0.0))


class LinearMap:
    """Dense linear operator with forward and adjoint application."""

    def __init__(self, mat):
        arr = np.asarray(mat, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"operator matrix must be 2-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("operator matrix has non-finite entries")
        self.mat = arr

    @property
    def shape(self) -> tuple[int, int]:
        return self.mat.shape

    @property
    def rows(self) -> int:
        return self.mat.shape[0]

    @property
    def cols(self) -> int:
        return self.mat.shape[1]

    def matvec(self, x) -> np.ndarray:
        v = np.asarray(x, dtype=float)
        if v.shape != (self.cols,):
            raise ValueError(f"dimension mismatch: expected {self.cols}, got {v.shape}")
        return self.mat @ v

    def rmatvec(self, y) -> np.ndarray:
        v = np.asarray(y, dtype=float)
        if v.shape != (self.rows,):
            raise ValueError(f"dimension mismatch: expected {self.rows}, got {v.shape}")
        return self.mat.T @ v

    # Gram matrices are cached: the solver refactors I + t*s*K'K many times
    # while stepsizes move, and the product itself never changes.
    @cached_property
    def gram_cols(self) -> np.ndarray:
        """K.T @ K, cached."""
        return self.mat.T @ self.mat

    @cached_property
    def gram_rows(self) -> np.ndarray:
        """K @ K.T, cached."""
        return self.mat @ self.mat.T

"""Log-magnitude linear algebra primitives.

Determinant-like quantities are carried as (sign, log|value|) pairs so that
objectives which multiply many small or large factors neither underflow nor
overflow.  All singularity decisions use a tolerance relative to the largest
column norm of the input, so the primitives are scale invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotPSDError

# Relative tolerances.  RANK_TOL gates pivot / singular-value acceptance,
# RECON_TOL bounds the max-entry error of a recovered factorization, and
# PSD_TOL bounds how negative an eigenvalue may be before we reject a kernel.
RANK_TOL = 1e-10
RECON_TOL = 1e-8
PSD_TOL = 1e-8

NEG_INF = float("-inf")


@dataclass(frozen=True)
class LogMagnitude:
    """A real number stored as sign and natural log of the magnitude.

    ``sign == 0`` encodes an exact (or numerically indistinguishable) zero
    and forces ``log_abs == -inf``.
    """

    log_abs: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        if (self.sign == 0) != (self.log_abs == NEG_INF):
            raise ValueError("sign 0 must pair with log_abs == -inf and vice versa")
        if math.isnan(self.log_abs):
            raise ValueError("log_abs must not be NaN")

    @classmethod
    def zero(cls) -> "LogMagnitude":
        return cls(NEG_INF, 0)

    @property
    def value(self) -> float:
        """Back-convert to a plain float; may overflow to inf by design."""
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)


def _as_matrix(a, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _max_column_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, axis=0).max())


def det_logmag(a) -> LogMagnitude:
    """Determinant of a square matrix as a LogMagnitude.

    Gaussian elimination with partial pivoting; a pivot whose magnitude falls
    below RANK_TOL times the largest column norm declares the matrix singular
    (sign 0) rather than returning a meaningless tiny value.
    """
    a = _as_matrix(a)
    n, m = a.shape
    if n != m:
        raise DimensionError(f"determinant needs a square matrix, got {n}x{m}")
    if n == 0:
        return LogMagnitude(0.0, 1)  # empty product convention
    tol = RANK_TOL * _max_column_norm(a)
    u = a.copy()
    sign = 1
    log_abs = 0.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(u[k:, k])))
        piv = u[p, k]
        if abs(piv) <= tol:
            return LogMagnitude.zero()
        if p != k:
            u[[k, p], k:] = u[[p, k], k:]
            sign = -sign
        if piv < 0:
            sign = -sign
        log_abs += math.log(abs(piv))
        if k + 1 < n:
            u[k + 1 :, k + 1 :] -= np.outer(u[k + 1 :, k] / piv, u[k, k + 1 :])
    return LogMagnitude(log_abs, sign)


def gram_volume_logmag(u) -> LogMagnitude:
    """log of det(U^T U)^(1/2), the volume of the parallelepiped spanned
    by the columns of U.

    Computed from the triangular factor of a QR decomposition of U itself;
    forming U^T U would square the condition number.  The sign is +1 for a
    full-column-rank input and 0 when some R diagonal entry falls below the
    rank tolerance.
    """
    u = _as_matrix(u, "factor")
    d, r = u.shape
    if r < 1:
        raise DimensionError("need at least one column")
    if d < r:
        raise DimensionError(f"more columns than rows ({r} > {d}); volume is zero-dimensional")
    scale = _max_column_norm(u)
    if scale == 0.0:
        return LogMagnitude.zero()
    rfac = np.linalg.qr(u, mode="r")
    diag = np.abs(np.diag(rfac))
    if np.any(diag <= RANK_TOL * scale):
        return LogMagnitude.zero()
    return LogMagnitude(float(np.log(diag).sum()), 1)


def dist_to_span(u, vectors) -> float:
    """Euclidean distance from ``u`` to the span of the given vectors.

    ``vectors`` may be a sequence of 1-d arrays or a matrix whose columns are
    the vectors.  An empty collection spans only the origin.  The span basis
    is taken from the singular vectors above the rank tolerance, so nearly
    dependent inputs do not inflate the subspace.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 1:
        raise DimensionError(f"point must be a vector, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError("point contains non-finite entries")
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        cols = _as_matrix(vectors, "span")
    else:
        vecs = [np.asarray(v, dtype=float) for v in vectors]
        if not vecs:
            return float(np.linalg.norm(u))
        cols = _as_matrix(np.column_stack(vecs), "span")
    if cols.shape[0] != u.shape[0]:
        raise DimensionError(
            f"span vectors live in dimension {cols.shape[0]}, point in {u.shape[0]}"
        )
    if cols.shape[1] == 0:
        return float(np.linalg.norm(u))
    scale = _max_column_norm(cols)
    if scale == 0.0:
        return float(np.linalg.norm(u))
    basis, sing, _ = np.linalg.svd(cols, full_matrices=False)
    basis = basis[:, sing > RANK_TOL * scale]
    resid = u - basis @ (basis.T @ u)
    return float(np.linalg.norm(resid))


def psd_factor(l) -> np.ndarray:
    """Factor a PSD matrix L as V^T V with V of shape (rank, m).

    Uses a symmetric eigendecomposition.  Eigenvalues in [-tol, 0) are
    clipped to zero, where tol scales with trace(L)/m; anything more negative
    raises NotPSDError.  Rows of V are ordered by decreasing eigenvalue so
    the factor is deterministic.
    """
    l = _as_matrix(l, "kernel")
    m, n = l.shape
    if m != n:
        raise DimensionError(f"kernel must be square, got {m}x{n}")
    if m == 0:
        return np.zeros((0, 0))
    scale = max(1.0, float(np.abs(l).max()))
    if float(np.abs(l - l.T).max()) > PSD_TOL * scale:
        raise ValueError("kernel is not symmetric within tolerance")
    sym = (l + l.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(sym)
    neg_tol = PSD_TOL * max(float(np.trace(sym)) / m, 0.0)
    if eigvals[0] < -neg_tol:
        raise NotPSDError(
            f"eigenvalue {eigvals[0]:.6e} below PSD tolerance -{neg_tol:.6e}"
        )
    eigvals = np.clip(eigvals, 0.0, None)
    rank_tol = eigvals[-1] * m * np.finfo(float).eps
    order = np.argsort(eigvals)[::-1]
    order = order[eigvals[order] > rank_tol]
    v = (eigvecs[:, order] * np.sqrt(eigvals[order])).T
    recon_err = float(np.abs(v.T @ v - sym).max()) if v.size else float(np.abs(sym).max())
    if recon_err > RECON_TOL * scale:
        raise ValueError(f"factorization residual {recon_err:.3e} exceeds tolerance")
    return v

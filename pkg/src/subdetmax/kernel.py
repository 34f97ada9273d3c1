"""Kernel data: a PSD matrix L together with a factor V satisfying L = V^T V.

Every solver works on the factor; keeping L alongside it lets reports and
oracles cross-check objective values against determinants of L submatrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .numkernel import RECON_TOL, _as_matrix, psd_factor


@dataclass(frozen=True, eq=False)
class KernelInstance:
    """An m x m PSD kernel and a d x m factor of it.

    ``matrix[i, j]`` is the inner product of columns i and j of ``factor``.
    Construction validates the reconstruction up to RECON_TOL relative to
    the kernel scale, so a mismatched pair is rejected early.
    """

    matrix: np.ndarray
    factor: np.ndarray

    def __post_init__(self):
        l = _as_matrix(self.matrix, "kernel")
        v = _as_matrix(self.factor, "factor")
        if l.shape[0] != l.shape[1]:
            raise DimensionError(f"kernel must be square, got {l.shape}")
        if v.shape[1] != l.shape[0]:
            raise DimensionError(
                f"factor has {v.shape[1]} columns but kernel is {l.shape[0]}x{l.shape[0]}"
            )
        object.__setattr__(self, "matrix", l)
        object.__setattr__(self, "factor", v)
        scale = max(1.0, float(np.abs(l).max())) if l.size else 1.0
        err = float(np.abs(v.T @ v - l).max()) if l.size else 0.0
        if err > RECON_TOL * scale:
            raise ValueError(
                f"factor does not reproduce the kernel (max entry error {err:.3e})"
            )

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def d(self) -> int:
        return self.factor.shape[0]

    @classmethod
    def from_psd(cls, matrix) -> "KernelInstance":
        """Build from L alone; the factor comes from its eigendecomposition."""
        l = _as_matrix(matrix, "kernel")
        return cls(l, psd_factor(l))

    @classmethod
    def from_factor(cls, factor) -> "KernelInstance":
        """Build from V alone; the kernel is the Gram matrix V^T V."""
        v = _as_matrix(factor, "factor")
        return cls(v.T @ v, v)

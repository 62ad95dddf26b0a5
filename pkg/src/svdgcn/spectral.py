"""SVD of the normalized adjacency."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SpectralError

__all__ = ["SvdFactors", "compute_svd", "svd_call_count", "orthonormality_error"]

_SVD_CALLS = 0


def svd_call_count() -> int:
    """Number of :func:`compute_svd` calls made in this process."""
    return _SVD_CALLS


@dataclass(frozen=True)
class SvdFactors:
    """``a_hat = U @ diag(lam) @ V.T`` with singular vectors as columns."""

    U: np.ndarray
    V: np.ndarray
    lam: np.ndarray

    @property
    def n(self) -> int:
        return self.lam.shape[0]

    @property
    def lambda_max(self) -> float:
        return float(self.lam[0]) if self.lam.size else 0.0

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.lam) @ self.V.T

    def flip_signs(self, mask) -> "SvdFactors":
        """Another valid SVD obtained by negating matched ``(u_i, v_i)`` pairs."""
        sign = np.where(np.asarray(mask, dtype=bool), -1.0, 1.0)
        return SvdFactors(self.U * sign, self.V * sign, self.lam)


def compute_svd(a_hat) -> SvdFactors:
    """Full SVD of a square matrix; singular values come back non-increasing."""
    global _SVD_CALLS
    a = np.asarray(a_hat, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise SpectralError(f"non-finite entries in {a.shape[0]}x{a.shape[1]} matrix")
    _SVD_CALLS += 1
    try:
        u, lam, vt = np.linalg.svd(a)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(
            f"SVD did not converge for {a.shape[0]}x{a.shape[1]} matrix: {exc}"
        ) from exc
    return SvdFactors(u, vt.T, lam)


def orthonormality_error(svd: SvdFactors) -> float:
    """Largest Frobenius deviation of ``U^T U`` or ``V^T V`` from the identity."""
    eye = np.eye(svd.n)
    return max(
        np.linalg.norm(svd.U.T @ svd.U - eye),
        np.linalg.norm(svd.V.T @ svd.V - eye),
    )

"""Quasi-framelet modulation functions and their Chebyshev approximations.

Every shipped set ``g_0 .. g_K`` lives on ``[0, pi]`` and satisfies
``sum_k g_k(xi)**2 == 1``. Arguments outside the domain are clamped.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

__all__ = [
    "Family",
    "ModulationSet",
    "eval_modulation",
    "check_identity",
    "check_monotone",
    "ChebFilter",
    "cheb_nodes",
    "cheb_fit",
    "cheb_fit_function",
    "cheb_eval_scalar",
    "cheb_fit_error",
]

DOMAIN = np.pi


class Family(str, enum.Enum):
    LINEAR = "linear"
    ENTROPY = "entropy"
    # two-band set cos/sin(xi/2); small enough for hand checks
    HAAR = "haar"


@dataclass(frozen=True)
class ModulationSet:
    family: Family = Family.LINEAR
    alpha: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.ENTROPY and not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"entropy alpha must lie in (0, 1], got {self.alpha}")

    @property
    def K(self) -> int:
        return 1 if self.family is Family.HAAR else 2

    @property
    def num_functions(self) -> int:
        return self.K + 1

    def evaluate(self, k, xi):
        if not 0 <= k <= self.K:
            raise ConfigError(f"band index {k} outside 0..{self.K} for {self.family.value}")
        xi = np.clip(np.asarray(xi, dtype=float), 0.0, DOMAIN)
        if self.family is Family.LINEAR:
            return _linear(k, xi)
        if self.family is Family.ENTROPY:
            return _entropy(k, xi, self.alpha)
        return np.cos(xi / 2) if k == 0 else np.sin(xi / 2)

    def __str__(self):
        if self.family is Family.ENTROPY:
            return f"entropy(alpha={self.alpha:g})"
        return self.family.value


def _linear(k, xi):
    if k == 0:
        return np.cos(xi / 2) ** 2
    if k == 1:
        return np.sin(xi) / np.sqrt(2.0)
    return np.sin(xi / 2) ** 2


def _entropy(k, xi, alpha):
    t = xi / np.pi
    g1_sq = np.maximum(4 * alpha * t - 4 * alpha * t * t, 0.0)
    if k == 1:
        return np.sqrt(g1_sq)
    rest = np.sqrt(np.maximum(1.0 - g1_sq, 0.0))
    if k == 0:
        return np.where(xi <= np.pi / 2, rest, 0.0)
    return np.where(xi > np.pi / 2, rest, 0.0)


def eval_modulation(mset: ModulationSet, k: int, xi):
    """Value of ``g_k`` at ``xi`` (scalar in, float out; arrays broadcast)."""
    out = mset.evaluate(k, xi)
    return float(out) if np.ndim(out) == 0 else out


def check_identity(mset, grid_size: int = 1001) -> float:
    """Max over a uniform grid on ``[0, pi]`` of ``|sum_k g_k^2 - 1|``."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    xi = np.linspace(0.0, DOMAIN, grid_size)
    total = sum(np.asarray(mset.evaluate(k, xi)) ** 2 for k in range(mset.K + 1))
    return float(np.max(np.abs(total - 1.0)))


def check_monotone(mset, grid_size: int = 1001, tol: float = 1e-12) -> bool:
    """``g_0`` non-increasing 1 -> 0 and ``g_K`` non-decreasing 0 -> 1 on the grid."""
    xi = np.linspace(0.0, DOMAIN, grid_size)
    g0 = mset.evaluate(0, xi)
    gk = mset.evaluate(mset.K, xi)
    return bool(
        np.all(np.diff(g0) <= tol)
        and np.all(np.diff(gk) >= -tol)
        and abs(g0[0] - 1) <= tol
        and abs(gk[0]) <= tol
    )


def cheb_nodes(degree: int) -> np.ndarray:
    """The ``degree + 1`` Chebyshev points of the first kind on ``[-1, 1]``."""
    j = np.arange(degree + 1)
    return np.cos(np.pi * (j + 0.5) / (degree + 1))


def cheb_fit_function(fn, degree: int) -> np.ndarray:
    """Coefficients of the degree-``n`` Chebyshev interpolant of ``fn`` on ``[0, pi]``.

    The interpolant is ``sum_j c[j] T_j(2 xi / pi - 1)``; coefficients come
    from the discrete orthogonality of ``T_j`` at the first-kind nodes.
    """
    if degree < 1:
        raise ConfigError(f"Chebyshev degree must be >= 1, got {degree}")
    n1 = degree + 1
    t = cheb_nodes(degree)
    values = np.asarray(fn(DOMAIN * (t + 1) / 2), dtype=float) * np.ones(n1)
    theta = np.arccos(t)
    basis = np.cos(np.outer(np.arange(n1), theta))
    coeffs = (2.0 / n1) * basis @ values
    coeffs[0] /= 2
    return coeffs


def cheb_fit(mset: ModulationSet, k: int, degree: int) -> np.ndarray:
    return cheb_fit_function(lambda xi: mset.evaluate(k, xi), degree)


def cheb_eval_scalar(coeffs, xi):
    """Clenshaw evaluation of a fitted band at ``xi`` (clamped to ``[0, pi]``)."""
    c = np.asarray(coeffs, dtype=float)
    t = 2.0 * np.clip(np.asarray(xi, dtype=float), 0.0, DOMAIN) / DOMAIN - 1.0
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for cj in c[:0:-1]:
        b1, b2 = 2.0 * t * b1 - b2 + cj, b1
    out = t * b1 - b2 + c[0]
    return float(out) if np.ndim(out) == 0 else out


def cheb_fit_error(mset: ModulationSet, k: int, degree: int, grid_size: int = 10001) -> float:
    """Max deviation of the fitted band from ``g_k`` on a dense uniform grid."""
    xi = np.linspace(0.0, DOMAIN, grid_size)
    approx = cheb_eval_scalar(cheb_fit(mset, k, degree), xi)
    return float(np.max(np.abs(approx - mset.evaluate(k, xi))))


@dataclass(frozen=True)
class ChebFilter:
    """Per-band Chebyshev coefficients, shape ``(K + 1, degree + 1)``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if c.shape[1] < 2:
            raise ConfigError("Chebyshev degree must be >= 1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def fit(cls, mset: ModulationSet, degree: int = 10) -> "ChebFilter":
        return cls(np.stack([cheb_fit(mset, k, degree) for k in range(mset.K + 1)]))

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def K(self) -> int:
        return self.coeffs.shape[0] - 1

    def band(self, k: int) -> np.ndarray:
        return self.coeffs[k]

    def evaluate(self, k, xi):
        return cheb_eval_scalar(self.coeffs[k], xi)

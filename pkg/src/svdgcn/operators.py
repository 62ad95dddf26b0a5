"""SVD-framelet decomposition / reconstruction operator banks.

Band order is ``(0, L), (1, 0) .. (K, 0), (1, 1) .. (K, L)``. A band's
spectral multiplier is a cascade of modulation functions evaluated at the
dilated spectrum ``lam / s**(m + j)``::

    (0, L):  g_0(x_L) ... g_0(x_0)
    (k, l):  g_k(x_l) g_0(x_{l-1}) ... g_0(x_0)

so the squared multipliers telescope to one. The exact bank uses the
singular values of ``a_hat`` directly and carries a matching reconstruction
bank; the Chebyshev bank works on ``a_hat^T a_hat`` (singular values
squared) and replaces every ``g`` by a fitted polynomial, which needs no SVD.
"""
from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from . import kernels
from .errors import ConfigError, DimensionError, SpectralError, VariantError
from .framelets import DOMAIN, ChebFilter, ModulationSet
from .spectral import SvdFactors

__all__ = [
    "Variant",
    "FrameletConfig",
    "FrameletOperators",
    "band_index",
    "band_multipliers",
    "resolve_base_exponent",
    "estimate_sq_lambda_max",
    "build_exact_operators",
    "build_exact_sq_operators",
    "build_cheb_operators",
    "decompose",
    "reconstruct",
    "verify_theorem1",
    "partition_error",
    "framelet_atom",
    "atom_expansion",
    "dump_bank",
    "load_bank",
    "relative_frobenius",
    "dense",
]


class Variant(str, enum.Enum):
    EXACT = "exact"
    CHEBYSHEV = "chebyshev"


@dataclass(frozen=True)
class FrameletConfig:
    """Levels ``L``, dilation scale ``s`` and base exponent ``m``.

    ``m=None`` picks the smallest exponent that maps the spectrum into
    ``[0, pi]``. ``raw_scale`` pins ``m = 0`` and skips that check.
    """

    levels: int = 1
    scale: float = 2.0
    base_exponent: int | None = None
    variant: Variant = Variant.EXACT
    cheb_degree: int = 10
    raw_scale: bool = False
    dense_threshold: int = 4096

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.levels < 0:
            raise ConfigError(f"levels must be >= 0, got {self.levels}")
        if not self.scale > 1:
            raise ConfigError(f"scale must be > 1, got {self.scale}")
        if self.base_exponent is not None and self.base_exponent < 0:
            raise ConfigError(f"base exponent must be >= 0, got {self.base_exponent}")
        if self.cheb_degree < 1:
            raise ConfigError(f"Chebyshev degree must be >= 1, got {self.cheb_degree}")


def band_index(K: int, L: int):
    """Ordered ``(k, l)`` labels; there are ``1 + K (L + 1)`` of them."""
    out = [(0, L)]
    for ell in range(L + 1):
        out.extend((k, ell) for k in range(1, K + 1))
    return out


def resolve_base_exponent(lambda_max: float, s: float, domain_cap: float = DOMAIN) -> int:
    """Smallest ``m >= 0`` with ``lambda_max / s**m <= domain_cap``."""
    if lambda_max < 0 or not s > 1:
        raise ConfigError(f"need lambda_max >= 0 and s > 1, got {lambda_max}, {s}")
    m = 0
    value = float(lambda_max)
    while value > domain_cap:
        value /= s
        m += 1
    return m


def _resolve_config(cfg: FrameletConfig, spectral_max: float) -> FrameletConfig:
    if cfg.raw_scale:
        return replace(cfg, base_exponent=0)
    if cfg.base_exponent is None:
        return replace(cfg, base_exponent=resolve_base_exponent(spectral_max, cfg.scale))
    if spectral_max / cfg.scale**cfg.base_exponent > DOMAIN * (1 + 1e-12):
        raise ConfigError(
            f"spectral argument {spectral_max / cfg.scale ** cfg.base_exponent:.6g} "
            f"exceeds pi with m={cfg.base_exponent}, s={cfg.scale}"
        )
    return cfg


def band_multipliers(evaluate, K: int, spectrum, cfg: FrameletConfig):
    """Per-band spectral multipliers for a resolved config.

    ``evaluate(k, xi)`` is either a modulation set or a fitted filter.
    """
    spectrum = np.asarray(spectrum, dtype=float)
    m, s, L = cfg.base_exponent, cfg.scale, cfg.levels
    args = [spectrum / s ** (m + j) for j in range(L + 1)]
    low = [np.ones_like(spectrum)]
    for j in range(L + 1):
        low.append(low[-1] * evaluate(0, args[j]))
    out = []
    for k, ell in band_index(K, L):
        if k == 0:
            out.append(low[L + 1])
        else:
            out.append(evaluate(k, args[ell]) * low[ell])
    return out


@dataclass(frozen=True, eq=False)
class FrameletOperators:
    """An immutable operator bank.

    ``decomp[b]`` and ``recon[b]`` are dense arrays or, for large Chebyshev
    banks, :class:`~scipy.sparse.linalg.LinearOperator` objects. ``recon`` is
    ``None`` on the Chebyshev path.
    """

    index: list
    decomp: list = field(repr=False)
    recon: list | None = field(repr=False)
    config: FrameletConfig
    a_hat: object = field(repr=False)
    svd: SvdFactors | None = field(default=None, repr=False)
    multipliers: list | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.a_hat.shape[0]

    @property
    def num_bands(self) -> int:
        return len(self.index)

    @property
    def variant(self) -> Variant:
        return self.config.variant

    @property
    def is_dense(self) -> bool:
        return all(isinstance(w, np.ndarray) for w in self.decomp)


def build_exact_operators(svd: SvdFactors, mset: ModulationSet, cfg: FrameletConfig,
                          a_hat=None) -> FrameletOperators:
    """Dense decomposition ``V f_b sqrt(lam) V^T`` and reconstruction ``U sqrt(lam) f_b V^T``."""
    if cfg.variant is not Variant.EXACT:
        raise VariantError("build_exact_operators needs variant=exact")
    cfg = _resolve_config(cfg, svd.lambda_max)
    root = np.sqrt(svd.lam)
    mults = band_multipliers(mset.evaluate, mset.K, svd.lam, cfg)
    decomp = [(svd.V * (f * root)) @ svd.V.T for f in mults]
    recon = [(svd.U * (root * f)) @ svd.V.T for f in mults]
    if a_hat is None:
        a_hat = svd.reconstruct()
    return FrameletOperators(band_index(mset.K, cfg.levels), decomp, recon, cfg,
                             a_hat, svd, mults)


def build_exact_sq_operators(svd: SvdFactors, mset: ModulationSet, cfg: FrameletConfig,
                             a_hat=None) -> FrameletOperators:
    """Exact ``V f_b(lam**2) V^T`` bank: the target the Chebyshev bank approximates."""
    cfg = _resolve_config(replace(cfg, variant=Variant.CHEBYSHEV), svd.lambda_max**2)
    mults = band_multipliers(mset.evaluate, mset.K, svd.lam**2, cfg)
    decomp = [(svd.V * f) @ svd.V.T for f in mults]
    if a_hat is None:
        a_hat = svd.reconstruct()
    return FrameletOperators(band_index(mset.K, cfg.levels), decomp, None, cfg,
                             a_hat, svd, mults)


def _as_csr(a_hat) -> sp.csr_matrix:
    mat = sp.csr_matrix(a_hat, dtype=float)
    mat.sort_indices()
    return mat


def estimate_sq_lambda_max(a_hat, max_iter: int = 100, rtol: float = 1e-8, seed: int = 0) -> float:
    """Largest eigenvalue of ``a_hat^T a_hat`` by power iteration."""
    a = _as_csr(a_hat)
    n = a.shape[0]
    v = np.random.default_rng(seed).random((n, 1)) + 0.5
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = kernels.gram_apply(a.indptr, a.indices, a.data, v)
        new = float(v[:, 0] @ w[:, 0])
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        if abs(new - est) <= rtol * abs(new):
            return new
        est = new
    raise SpectralError(
        f"power iteration on {n}x{n} gram matrix did not converge in {max_iter} iterations"
    )


def _poly_chain(a: sp.csr_matrix, steps):
    """Apply ``prod_j p_j(alpha_j A^T A - I)`` to a dense block."""

    def apply(x):
        x = np.asarray(x, dtype=float)
        vec = x.ndim == 1
        y = x.reshape(x.shape[0], -1)
        for coeffs, alpha in steps:
            y = kernels.cheb_filter_apply(a.indptr, a.indices, a.data, y, coeffs, alpha)
        return y[:, 0] if vec else y

    return apply


def build_cheb_operators(a_hat, cheb: ChebFilter, cfg: FrameletConfig,
                         sq_lambda_max: float | None = None) -> FrameletOperators:
    """Polynomial bank in ``a_hat^T a_hat``; never calls an SVD.

    Banks with ``n <= cfg.dense_threshold`` are materialized; larger ones
    stay as linear operators applied through the Chebyshev recurrence.
    """
    if cfg.variant is not Variant.CHEBYSHEV:
        raise VariantError("build_cheb_operators needs variant=chebyshev")
    a = _as_csr(a_hat)
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if sq_lambda_max is None:
        sq_lambda_max = estimate_sq_lambda_max(a)
    cfg = _resolve_config(cfg, sq_lambda_max)
    m, s, L = cfg.base_exponent, cfg.scale, cfg.levels
    alphas = [2.0 / (DOMAIN * s ** (m + j)) for j in range(L + 1)]
    index = band_index(cheb.K, L)
    decomp = []
    for k, ell in index:
        if k == 0:
            steps = [(cheb.band(0), alphas[j]) for j in range(L + 1)]
        else:
            steps = [(cheb.band(0), alphas[j]) for j in range(ell)]
            steps.append((cheb.band(k), alphas[ell]))
        apply = _poly_chain(a, steps)
        if n <= cfg.dense_threshold:
            decomp.append(apply(np.eye(n)))
        else:
            # symmetric: products of commuting polynomials in a symmetric matrix
            decomp.append(LinearOperator((n, n), matvec=apply, rmatvec=apply,
                                         matmat=apply, rmatmat=apply, dtype=float))
    a_keep = a.toarray() if n <= cfg.dense_threshold and not sp.issparse(a_hat) else a
    return FrameletOperators(index, decomp, None, cfg, a_keep)


def _check_rows(ops: FrameletOperators, x):
    x = np.asarray(x, dtype=float)
    if x.shape[0] != ops.n:
        raise DimensionError(f"signal has {x.shape[0]} rows, bank expects {ops.n}")
    return x


def decompose(ops: FrameletOperators, x):
    """One coefficient block ``W_b @ x`` per band."""
    x = _check_rows(ops, x)
    return [w @ x for w in ops.decomp]


def reconstruct(ops: FrameletOperators, blocks):
    """``sum_b V_b @ block_b``; exact banks only."""
    if ops.recon is None:
        raise VariantError("reconstruction needs an exact bank; the Chebyshev bank has none")
    if len(blocks) != ops.num_bands:
        raise DimensionError(f"got {len(blocks)} blocks for {ops.num_bands} bands")
    out = None
    for v, blk in zip(ops.recon, blocks):
        blk = _check_rows(ops, blk)
        term = v @ blk
        out = term if out is None else out + term
    return out


def verify_theorem1(ops: FrameletOperators, a_hat=None) -> float:
    """Relative Frobenius error of ``sum_b V_b W_b`` against ``a_hat``."""
    if ops.recon is None:
        raise VariantError("reconstruction check needs an exact bank")
    a = np.asarray(ops.a_hat if a_hat is None else a_hat, dtype=float)
    total = sum(v @ w for v, w in zip(ops.recon, ops.decomp))
    denom = np.linalg.norm(a)
    err = np.linalg.norm(total - a)
    return float(err / denom) if denom > 0 else float(err)


def partition_error(ops: FrameletOperators) -> float:
    """Frobenius distance of ``sum_b W_b^T W_b`` from the identity."""
    n = ops.n
    eye = np.eye(n)
    total = np.zeros((n, n))
    for w in ops.decomp:
        wd = w if isinstance(w, np.ndarray) else w @ eye
        total += wd.T @ wd
    return float(np.linalg.norm(total - eye))


_ATOM_KINDS = ("phi", "psi", "phi_bar", "psi_bar")


def framelet_atom(svd: SvdFactors, mset: ModulationSet, cfg: FrameletConfig, kind: str,
                  level: int, node: int, k: int = 1) -> np.ndarray:
    """Single-scale SVD-framelet translated to ``node``.

    Forward atoms are rows of ``V sqrt(lam) g(lam / s**(m+level)) V^T``;
    backward atoms are columns of ``U sqrt(lam) g(...) V^T``. ``phi``
    variants use ``g_0``, ``psi`` variants use ``g_k``.
    """
    if kind not in _ATOM_KINDS:
        raise ValueError(f"kind must be one of {_ATOM_KINDS}, got {kind!r}")
    if not 0 <= node < svd.n:
        raise IndexError(f"node {node} outside 0..{svd.n - 1}")
    if level < 0:
        raise IndexError(f"level must be >= 0, got {level}")
    band = 0 if kind.startswith("phi") else k
    if kind.startswith("psi") and not 1 <= k <= mset.K:
        raise IndexError(f"high-pass index {k} outside 1..{mset.K}")
    cfg = _resolve_config(cfg, svd.lambda_max)
    coef = np.sqrt(svd.lam) * mset.evaluate(band, svd.lam / cfg.scale ** (cfg.base_exponent + level))
    if kind.endswith("bar"):
        return svd.U @ (coef * svd.V[node])
    return svd.V @ (coef * svd.V[node])


def atom_expansion(svd: SvdFactors, mset: ModulationSet, cfg: FrameletConfig, x) -> np.ndarray:
    """Expand ``x`` atom by atom: coefficients on forward atoms, synthesis on backward ones.

    Reproduces ``a_hat @ x`` for ``L = 0``.
    """
    x = np.asarray(x, dtype=float)
    n = svd.n
    out = np.zeros(n)
    L = cfg.levels
    terms = [("phi", L, 0)] + [("psi", ell, k) for ell in range(L + 1) for k in range(1, mset.K + 1)]
    for kind, ell, k in terms:
        for p in range(n):
            fwd = framelet_atom(svd, mset, cfg, kind, ell, p, k=max(k, 1))
            back = framelet_atom(svd, mset, cfg, kind + "_bar", ell, p, k=max(k, 1))
            out += (fwd @ x) * back
    return out


_BANK_MAGIC = b"SVDFRMB1"


def dump_bank(ops: FrameletOperators, path) -> None:
    """Write a dense bank: header, then per matrix ``(k, l, role)`` and row-major float64."""
    if not ops.is_dense:
        raise VariantError("only dense banks can be dumped")
    mats = [(k, ell, 0, w) for (k, ell), w in zip(ops.index, ops.decomp)]
    if ops.recon is not None:
        mats += [(k, ell, 1, v) for (k, ell), v in zip(ops.index, ops.recon)]
    with open(path, "wb") as fh:
        fh.write(_BANK_MAGIC)
        fh.write(struct.pack("<II", ops.n, len(mats)))
        for k, ell, role, mat in mats:
            fh.write(struct.pack("<iiB", k, ell, role))
            fh.write(np.ascontiguousarray(mat, dtype="<f8").tobytes())


def load_bank(path) -> dict:
    """Read :func:`dump_bank` output as ``{(role, k, l): matrix}``, role in {"W", "V"}."""
    data = Path(path).read_bytes()
    if data[:8] != _BANK_MAGIC:
        raise ValueError(f"{path}: not a framelet bank file")
    n, count = struct.unpack_from("<II", data, 8)
    pos = 16
    out = {}
    size = n * n * 8
    for _ in range(count):
        k, ell, role = struct.unpack_from("<iiB", data, pos)
        pos += 9
        mat = np.frombuffer(data, dtype="<f8", count=n * n, offset=pos).reshape(n, n).copy()
        pos += size
        out[("W" if role == 0 else "V", k, ell)] = mat
    if pos != len(data):
        raise ValueError(f"{path}: trailing bytes in bank file")
    return out


def relative_frobenius(a, b) -> float:
    denom = np.linalg.norm(b)
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / denom) if denom else 0.0


def dense(op, n: int | None = None) -> np.ndarray:
    """Materialize a band (array or linear operator)."""
    if isinstance(op, np.ndarray):
        return op
    n = op.shape[0] if n is None else n
    return op @ np.eye(n)


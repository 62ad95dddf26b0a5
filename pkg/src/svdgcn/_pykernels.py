"""NumPy/SciPy reference versions of the compiled kernels."""
import numpy as np
import scipy.sparse as sp


def _csr(indptr, indices, data, n):
    return sp.csr_matrix((data, indices, indptr), shape=(n, n))


def gram_apply(indptr, indices, data, y, alpha=1.0):
    """``alpha * A^T A y`` for CSR ``A`` and dense ``y`` of shape ``(n, d)``."""
    y = np.asarray(y, dtype=float)
    a = _csr(indptr, indices, data, y.shape[0])
    return alpha * (a.T @ (a @ y))


def cheb_filter_apply(indptr, indices, data, x, coeffs, alpha):
    """``sum_j coeffs[j] T_j(alpha * A^T A - I) x``."""
    x = np.asarray(x, dtype=float)
    a = _csr(indptr, indices, data, x.shape[0])
    at = a.T.tocsr()

    def shifted(y):
        return alpha * (at @ (a @ y)) - y

    acc = coeffs[0] * x
    if len(coeffs) == 1:
        return acc
    prev, cur = x, shifted(x)
    acc = acc + coeffs[1] * cur
    for cj in coeffs[2:]:
        prev, cur = cur, 2.0 * shifted(cur) - prev
        acc += cj * cur
    return acc

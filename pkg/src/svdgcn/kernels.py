"""Kernel dispatch: compiled extension when available, NumPy/SciPy otherwise.

Set ``SVDGCN_PURE_PYTHON=1`` before import to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("SVDGCN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

gram_apply = _impl.gram_apply
cheb_filter_apply = _impl.cheb_filter_apply

__all__ = ["BACKEND", "gram_apply", "cheb_filter_apply"]

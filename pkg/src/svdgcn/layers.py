"""SVD-framelet convolution layers with learnable per-band spectral filters.

All variants share one computation. Per band ``b`` with decomposition map
``D_b`` and reconstruction map ``R_b``::

    C_b = D_b @ (X @ weight)
    Z   = sum_b R_b @ (theta[b][:, None] * C_b)
    Y   = act(Z)

* framelet1: ``D_b = W_b``, ``R_b = V_b`` from the exact bank.
* framelet2: ``D_b = W_b``, ``R_b = V sqrt(lam) f_b V^T`` (forward space only).
* framelet3: ``D_b = W_b`` from the Chebyshev bank, ``R_b = a_hat @ W_b^T``.
* baseline: a single band with ``D = a_hat``, ``R = I`` and frozen ``theta``,
  i.e. the plain ``act(a_hat X W)`` convolution.

A linear classifier head ``Y @ head + bias`` produces the logits.
"""
from __future__ import annotations

import enum
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import aslinearoperator

from .errors import DimensionError, VariantError
from .operators import FrameletOperators, Variant

__all__ = [
    "ModelVariant",
    "Activation",
    "SvdGcnModel",
    "build_model",
    "layer_forward",
    "forward_I",
    "forward_II",
    "forward_III",
    "logits",
    "backward",
    "save_checkpoint",
    "load_checkpoint",
]


class ModelVariant(str, enum.Enum):
    FRAMELET1 = "framelet1"
    FRAMELET2 = "framelet2"
    FRAMELET3 = "framelet3"
    BASELINE = "baseline"


class Activation(str, enum.Enum):
    RELU = "relu"
    IDENTITY = "identity"


PARAM_NAMES = ("theta", "weight", "head", "bias")


def _bank_pairs(variant: ModelVariant, ops: FrameletOperators | None, a_hat):
    if variant is ModelVariant.BASELINE:
        return [(a_hat, None)]
    if ops is None:
        raise VariantError(f"{variant.value} needs an operator bank")
    if variant is ModelVariant.FRAMELET1:
        if ops.variant is not Variant.EXACT or ops.recon is None:
            raise VariantError("framelet1 needs an exact bank")
        return list(zip(ops.decomp, ops.recon))
    if variant is ModelVariant.FRAMELET2:
        if ops.variant is not Variant.EXACT or ops.svd is None:
            raise VariantError("framelet2 needs an exact bank built from an SVD")
        svd = ops.svd
        root = np.sqrt(svd.lam)
        return [(w, (svd.V * (root * f)) @ svd.V.T) for w, f in zip(ops.decomp, ops.multipliers)]
    if ops.variant is not Variant.CHEBYSHEV:
        raise VariantError("framelet3 needs a Chebyshev (squared-spectrum) bank")
    a = ops.a_hat
    pairs = []
    for w in ops.decomp:
        if isinstance(w, np.ndarray):
            a_dense = a.toarray() if sp.issparse(a) else np.asarray(a)
            pairs.append((w, a_dense @ w.T))
        else:
            pairs.append((w, aslinearoperator(a) @ w.T))
    return pairs


def _apply(op, x):
    return x if op is None else op @ x


def _apply_t(op, x):
    if op is None:
        return x
    return op.T @ x


@dataclass(eq=False)
class SvdGcnModel:
    """One framelet layer plus a linear softmax head.

    ``params`` holds ``theta`` (bands x N), ``weight`` (d_in x d_out),
    ``head`` (d_out x C) and ``bias`` (C,).
    """

    variant: ModelVariant
    params: dict
    activation: Activation = Activation.RELU
    ops: FrameletOperators | None = field(default=None, repr=False)
    a_hat: object = field(default=None, repr=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.variant = ModelVariant(self.variant)
        self.activation = Activation(self.activation)
        if self.a_hat is None and self.ops is not None:
            self.a_hat = self.ops.a_hat
        self._pairs = _bank_pairs(self.variant, self.ops, self.a_hat)
        theta = self.params["theta"]
        if theta.shape[0] != len(self._pairs):
            raise DimensionError(
                f"theta has {theta.shape[0]} bands, operator bank has {len(self._pairs)}"
            )
        n = self.num_nodes
        if theta.shape[1] != n:
            raise DimensionError(f"theta rows have length {theta.shape[1]}, graph has {n} nodes")
        d_out = self.params["weight"].shape[1]
        if self.params["head"].shape[0] != d_out:
            raise DimensionError("head input size does not match layer output size")

    @property
    def num_nodes(self) -> int:
        return self.a_hat.shape[0]

    @property
    def trainable(self):
        if self.variant is ModelVariant.BASELINE:
            return ("weight", "head", "bias")
        return PARAM_NAMES

    def copy_params(self) -> dict:
        return {k: v.copy() for k, v in self.params.items()}


def _glorot(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def build_model(variant, d_in: int, d_out: int, n_classes: int, ops: FrameletOperators | None = None,
                a_hat=None, activation=Activation.RELU, seed: int = 0) -> SvdGcnModel:
    """Fresh model: ``theta`` all ones, Glorot-uniform ``weight`` and ``head``."""
    variant = ModelVariant(variant)
    if a_hat is None:
        if ops is None:
            raise VariantError("need an operator bank or a normalized adjacency")
        a_hat = ops.a_hat
    bands = 1 if variant is ModelVariant.BASELINE else ops.num_bands
    rng = np.random.default_rng(seed)
    params = {
        "theta": np.ones((bands, a_hat.shape[0])),
        "weight": _glorot(rng, d_in, d_out),
        "head": _glorot(rng, d_out, n_classes),
        "bias": np.zeros(n_classes),
    }
    return SvdGcnModel(variant, params, activation, ops, a_hat)


def layer_forward(model: SvdGcnModel, x, return_cache: bool = False):
    """Layer output ``act(Z)``; optionally the cache that :func:`backward` reuses."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != model.num_nodes:
        raise DimensionError(f"features must be ({model.num_nodes}, d), got {x.shape}")
    p = model.params
    if x.shape[1] != p["weight"].shape[0]:
        raise DimensionError(f"features have {x.shape[1]} columns, weight expects {p['weight'].shape[0]}")
    xw = x @ p["weight"]
    coeffs = []
    z = None
    for (dec, rec), th in zip(model._pairs, p["theta"]):
        c = np.asarray(_apply(dec, xw))
        coeffs.append(c)
        term = np.asarray(_apply(rec, th[:, None] * c))
        z = term if z is None else z + term
    y = np.maximum(z, 0.0) if model.activation is Activation.RELU else z
    if return_cache:
        return y, {"x": x, "xw": xw, "coeffs": coeffs, "z": z, "y": y}
    return y


def _variant_forward(expected, model, x):
    if model.variant is not expected:
        raise VariantError(f"model is {model.variant.value}, not {expected.value}")
    return layer_forward(model, x)


def forward_I(model: SvdGcnModel, x):
    return _variant_forward(ModelVariant.FRAMELET1, model, x)


def forward_II(model: SvdGcnModel, x):
    return _variant_forward(ModelVariant.FRAMELET2, model, x)


def forward_III(model: SvdGcnModel, x):
    return _variant_forward(ModelVariant.FRAMELET3, model, x)


def logits(model: SvdGcnModel, x, return_cache: bool = False):
    y, cache = layer_forward(model, x, return_cache=True)
    out = y @ model.params["head"] + model.params["bias"]
    return (out, cache) if return_cache else out


def backward(model: SvdGcnModel, x, upstream_grad, cache=None) -> dict:
    """Gradients of ``sum(upstream_grad * logits(model, x))`` for every parameter.

    The operator bank is constant.
    """
    if cache is None:
        _, cache = logits(model, x, return_cache=True)
    p = model.params
    g = np.asarray(upstream_grad, dtype=float)
    y, z = cache["y"], cache["z"]
    grads = {
        "head": y.T @ g,
        "bias": g.sum(axis=0),
    }
    dz = g @ p["head"].T
    if model.activation is Activation.RELU:
        dz = dz * (z > 0)
    dtheta = np.zeros_like(p["theta"])
    dxw = None
    for b, ((dec, rec), th, c) in enumerate(zip(model._pairs, p["theta"], cache["coeffs"])):
        dfilt = np.asarray(_apply_t(rec, dz))
        dtheta[b] = np.sum(dfilt * c, axis=1)
        term = np.asarray(_apply_t(dec, th[:, None] * dfilt))
        dxw = term if dxw is None else dxw + term
    grads["theta"] = dtheta
    grads["weight"] = cache["x"].T @ dxw
    if model.variant is ModelVariant.BASELINE:
        grads["theta"] = np.zeros_like(p["theta"])
    return grads


_CKPT_MAGIC = b"SVDGCNM1"


def save_checkpoint(model: SvdGcnModel, path, extra: dict | None = None) -> None:
    """Binary checkpoint: magic, header length, JSON header, float64 tensors."""
    header = {
        "variant": model.variant.value,
        "activation": model.activation.value,
        "shapes": {name: list(model.params[name].shape) for name in PARAM_NAMES},
        "meta": {**model.meta, **(extra or {})},
    }
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(_CKPT_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for name in PARAM_NAMES:
            fh.write(np.ascontiguousarray(model.params[name], dtype="<f8").tobytes())


def load_checkpoint(path):
    """Return ``(header, params)`` from :func:`save_checkpoint` output."""
    data = Path(path).read_bytes()
    if data[:8] != _CKPT_MAGIC:
        raise ValueError(f"{path}: not a model checkpoint")
    (hlen,) = struct.unpack_from("<I", data, 8)
    header = json.loads(data[12:12 + hlen].decode())
    pos = 12 + hlen
    params = {}
    for name in PARAM_NAMES:
        shape = tuple(header["shapes"][name])
        count = int(np.prod(shape)) if shape else 1
        params[name] = np.frombuffer(data, dtype="<f8", count=count, offset=pos).reshape(shape).copy()
        pos += 8 * count
    if pos != len(data):
        raise ValueError(f"{path}: trailing bytes in checkpoint")
    return header, params


"""Loss, Adam, the full-batch training loop and evaluation."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .layers import SvdGcnModel, backward, logits

__all__ = [
    "TrainConfig",
    "AdamState",
    "TrainResult",
    "cross_entropy",
    "adam_step",
    "accuracy",
    "evaluate",
    "inject_noise",
    "train",
    "write_history_csv",
]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    lr: float = 0.005
    # not reported in the source experiments; a common GCN default
    weight_decay: float = 5e-4
    hidden: int = 64
    dropout: float = 0.6
    seed: int = 0
    framelet: str = "linear"
    alpha: float = 0.5
    scale: float = 1.1
    levels: int = 1
    variant: str = "framelet1"
    cheb_degree: int = 10
    activation: str = "relu"
    transpose_adjacency: bool = False
    raw_scale: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if not 0 <= self.dropout < 1:
            raise ConfigError(f"dropout must lie in [0, 1), got {self.dropout}")
        if self.lr < 0 or self.weight_decay < 0:
            raise ConfigError("lr and weight_decay must be non-negative")
        if self.hidden < 1:
            raise ConfigError(f"hidden must be >= 1, got {self.hidden}")


@dataclass
class AdamState:
    lr: float = 0.005
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0
    # parameters the L2 penalty applies to; None means all
    decay: frozenset | None = None
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(state: AdamState, params: dict, grads: dict) -> dict:
    """One bias-corrected Adam update, in place on ``params`` (also returned).

    Only keys present in ``grads`` are updated.
    """
    state.step += 1
    t = state.step
    for name, g in grads.items():
        p = params[name]
        if g.shape != p.shape:
            raise ValueError(f"gradient for {name} has shape {g.shape}, parameter {p.shape}")
        if state.weight_decay and (state.decay is None or name in state.decay):
            g = g + state.weight_decay * p
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m = np.zeros_like(p)
            v = np.zeros_like(p)
        m = state.beta1 * m + (1 - state.beta1) * g
        v = state.beta2 * v + (1 - state.beta2) * g * g
        state.m[name], state.v[name] = m, v
        m_hat = m / (1 - state.beta1**t)
        v_hat = v / (1 - state.beta2**t)
        p -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return params


def _mask_index(mask, n):
    idx = np.flatnonzero(np.asarray(mask, dtype=bool)) if mask is not None else np.arange(n)
    if idx.size == 0:
        raise ConfigError("mask selects no nodes")
    return idx


def cross_entropy(logit_matrix, labels, mask=None, return_grad: bool = False):
    """Mean ``-log softmax`` of the true class over masked rows.

    With ``return_grad`` also returns ``d loss / d logits`` (zero off-mask).
    """
    z = np.asarray(logit_matrix, dtype=float)
    idx = _mask_index(mask, z.shape[0])
    zs = z[idx]
    zs = zs - zs.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(zs).sum(axis=1))
    y = np.asarray(labels)[idx]
    loss = float(np.mean(log_norm - zs[np.arange(idx.size), y]))
    if not return_grad:
        return loss
    probs = np.exp(zs - log_norm[:, None])
    probs[np.arange(idx.size), y] -= 1.0
    grad = np.zeros_like(z)
    grad[idx] = probs / idx.size
    return loss, grad


def accuracy(logit_matrix, labels, mask=None) -> float:
    """Share of masked rows whose argmax (lowest index on ties) is the label."""
    z = np.asarray(logit_matrix)
    idx = _mask_index(mask, z.shape[0])
    return float(np.mean(np.argmax(z[idx], axis=1) == np.asarray(labels)[idx]))


def evaluate(model: SvdGcnModel, dataset, mask) -> float:
    return accuracy(logits(model, dataset.features), dataset.labels, mask)


def inject_noise(x, sigma: float, seed: int = 0):
    """``x`` plus ``sigma`` times i.i.d. standard normal noise."""
    if sigma < 0:
        raise ConfigError(f"noise level must be >= 0, got {sigma}")
    x = np.asarray(x, dtype=float)
    if sigma == 0:
        return x.copy()
    return x + sigma * np.random.default_rng(seed).standard_normal(x.shape)


@dataclass
class TrainResult:
    model: SvdGcnModel
    history: list
    best_epoch: int
    val_acc: float
    test_acc: float


def train(model: SvdGcnModel, dataset, cfg: TrainConfig) -> TrainResult:
    """Full-batch training; returns the model restored to its best-validation epoch.

    Dropout acts on the input features during training only. Ties in
    validation accuracy go to the later epoch; without a validation mask the
    last epoch wins.
    """
    if not dataset.has_masks:
        raise ConfigError("dataset has no train/val/test split")
    train_idx = dataset.train_mask
    present = np.unique(dataset.labels[train_idx])
    missing = sorted(set(range(dataset.num_classes)) - set(present.tolist()))
    if missing:
        raise ConfigError(f"classes {missing} are absent from the training mask")
    has_val = bool(dataset.val_mask.any())
    x = dataset.features
    labels = dataset.labels
    rng = np.random.default_rng(cfg.seed + 7919)
    state = AdamState(lr=cfg.lr, weight_decay=cfg.weight_decay,
                      decay=frozenset({"weight", "head"}))
    trainable = model.trainable
    history = []
    best = None
    for epoch in range(1, cfg.epochs + 1):
        if cfg.dropout > 0:
            keep = rng.random(x.shape) >= cfg.dropout
            x_in = x * keep / (1.0 - cfg.dropout)
        else:
            x_in = x
        out, cache = logits(model, x_in, return_cache=True)
        loss, g = cross_entropy(out, labels, train_idx, return_grad=True)
        if not np.isfinite(loss):
            raise FloatingPointError(f"non-finite training loss at epoch {epoch}")
        grads = backward(model, x_in, g, cache)
        adam_step(state, model.params, {k: grads[k] for k in trainable})
        full = logits(model, x)
        val_acc = accuracy(full, labels, dataset.val_mask) if has_val else float("nan")
        test_acc = accuracy(full, labels, dataset.test_mask)
        history.append({"epoch": epoch, "train_loss": loss, "val_acc": val_acc,
                        "test_acc": test_acc})
        if best is None or not has_val or val_acc >= best[1]:
            best = (epoch, val_acc, test_acc, model.copy_params())
    epoch, val_acc, test_acc, params = best
    model.params = params
    return TrainResult(model, history, epoch, val_acc, test_acc)


def write_history_csv(history, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["epoch", "train_loss", "val_acc", "test_acc"])
        for row in history:
            writer.writerow([row["epoch"], repr(row["train_loss"]), repr(row["val_acc"]),
                             repr(row["test_acc"])])

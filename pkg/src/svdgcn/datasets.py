"""Node-classification datasets: synthetic directed SBM, splits, on-disk layout.

A dataset directory holds::

    edges.tsv     edge list (see :func:`svdgcn.graph.load_edge_list`)
    features.csv  N rows of d comma-separated floats
    labels.csv    N rows, one integer class id each
    masks.csv     optional; header ``train,val,test`` then N rows of 0/1
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, DatasetError
from .graph import DirectedGraph, load_edge_list, save_edge_list

__all__ = [
    "NodeDataset",
    "generate_sbm_digraph",
    "sbm_edges",
    "split_masks",
    "save_dataset",
    "load_dataset",
]


@dataclass(frozen=True, eq=False)
class NodeDataset:
    graph: DirectedGraph
    features: np.ndarray
    labels: np.ndarray
    train_mask: np.ndarray | None = None
    val_mask: np.ndarray | None = None
    test_mask: np.ndarray | None = None

    def __post_init__(self):
        n = self.graph.num_nodes
        if self.features.ndim != 2 or self.features.shape[0] != n:
            raise DatasetError(f"features have shape {self.features.shape}, graph has {n} nodes")
        if self.labels.shape != (n,):
            raise DatasetError(f"labels have shape {self.labels.shape}, graph has {n} nodes")
        if self.labels.size and self.labels.min() < 0:
            raise DatasetError("labels must be non-negative class ids")
        masks = [self.train_mask, self.val_mask, self.test_mask]
        if any(m is not None for m in masks):
            if any(m is None or m.shape != (n,) for m in masks):
                raise DatasetError("train/val/test masks must all be present with length N")
            if np.any(self.train_mask & self.val_mask) or np.any(self.train_mask & self.test_mask) \
                    or np.any(self.val_mask & self.test_mask):
                raise DatasetError("train/val/test masks overlap")

    @property
    def num_nodes(self) -> int:
        return self.graph.num_nodes

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    @property
    def num_classes(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    @property
    def has_masks(self) -> bool:
        return self.train_mask is not None

    def with_masks(self, train, val, test) -> "NodeDataset":
        return replace(self, train_mask=train, val_mask=val, test_mask=test)

    def with_features(self, features) -> "NodeDataset":
        return replace(self, features=np.asarray(features, dtype=float))


def _class_sizes(num_nodes, num_classes):
    base, extra = divmod(num_nodes, num_classes)
    return np.array([base + (c < extra) for c in range(num_classes)])


def _bernoulli_positions(rng, total, p):
    """Sorted positions in ``[0, total)`` kept by independent Bernoulli(p) trials."""
    if total <= 0 or p <= 0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1:
        return np.arange(total, dtype=np.int64)
    chunks = []
    pos = -1
    mean = total * p
    size = int(mean + 5 * np.sqrt(mean) + 16)
    while True:
        # geometric gaps between successes give the exact Bernoulli process
        gaps = rng.geometric(p, size=size)
        steps = pos + np.cumsum(gaps)
        chunks.append(steps[steps < total])
        if steps[-1] >= total:
            break
        pos = int(steps[-1])
    return np.concatenate(chunks)


def sbm_edges(sizes, p_in, p_out, rng):
    """Directed SBM edge array, no self-loops; block pairs are visited in order."""
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    parts = []
    for a, na in enumerate(sizes):
        for b, nb in enumerate(sizes):
            if a == b:
                idx = _bernoulli_positions(rng, na * (na - 1), p_in)
                r, c = np.divmod(idx, max(na - 1, 1))
                c = c + (c >= r)
            else:
                idx = _bernoulli_positions(rng, na * nb, p_out)
                r, c = np.divmod(idx, nb)
            parts.append(np.stack([r + offsets[a], c + offsets[b]], axis=1))
    return np.concatenate(parts).astype(np.int64) if parts else np.zeros((0, 2), np.int64)


def generate_sbm_digraph(num_nodes: int, num_classes: int, p_in: float, p_out: float,
                         feat_dim: int = 16, feat_noise: float = 0.5, seed: int = 0,
                         per_class_train: int | None = 20, val_size: int | None = None) -> NodeDataset:
    """Directed stochastic block model with Gaussian class-mean features.

    Edge ``i -> j`` appears with probability ``p_in`` inside a class and
    ``p_out`` across classes. Node features are the one-hot class mean plus
    ``feat_noise`` times standard normal noise. Classes are contiguous
    blocks of near-equal size. When ``per_class_train`` is set the dataset
    also gets a split; ``val_size=None`` means ``min(500, N // 5)``.
    """
    if not (0 <= p_out <= p_in <= 1):
        raise ConfigError(f"need 0 <= p_out <= p_in <= 1, got p_in={p_in}, p_out={p_out}")
    if num_classes < 1 or num_nodes < num_classes:
        raise ConfigError(f"need num_nodes >= num_classes >= 1, got {num_nodes}, {num_classes}")
    if feat_dim < num_classes:
        raise ConfigError(f"feat_dim ({feat_dim}) must be >= num_classes ({num_classes})")
    if feat_noise < 0:
        raise ConfigError("feat_noise must be non-negative")
    rng = np.random.default_rng(seed)
    sizes = _class_sizes(num_nodes, num_classes)
    labels = np.repeat(np.arange(num_classes), sizes)
    edges = sbm_edges(sizes, p_in, p_out, rng)
    features = np.eye(feat_dim)[labels] + feat_noise * rng.standard_normal((num_nodes, feat_dim))
    ds = NodeDataset(DirectedGraph(num_nodes, edges), features, labels)
    if per_class_train is not None:
        if val_size is None:
            val_size = min(500, num_nodes // 5)
        ds = ds.with_masks(*split_masks(labels, per_class_train, val_size, seed=seed))
    return ds


def split_masks(labels, per_class_train: int = 20, val_size: int = 500, seed: int = 0):
    """Random ``per_class_train`` nodes per class, then ``val_size`` validation, rest test."""
    labels = np.asarray(labels)
    n = labels.shape[0]
    classes = np.unique(labels)
    rng = np.random.default_rng(seed)
    train = np.zeros(n, dtype=bool)
    for c in classes:
        members = np.flatnonzero(labels == c)
        if members.size < per_class_train:
            raise ConfigError(
                f"class {c} has {members.size} nodes, fewer than {per_class_train} for training"
            )
        train[rng.choice(members, per_class_train, replace=False)] = True
    n_train = int(train.sum())
    if n <= n_train + val_size:
        raise ConfigError(f"{n} nodes leave no test nodes after {n_train} train + {val_size} val")
    if val_size == 0:
        warnings.warn("empty validation mask; model selection falls back to the last epoch",
                      stacklevel=2)
    rest = rng.permutation(np.flatnonzero(~train))
    val = np.zeros(n, dtype=bool)
    val[rest[:val_size]] = True
    test = ~(train | val)
    return train, val, test


def save_dataset(ds: NodeDataset, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    save_edge_list(ds.graph, d / "edges.tsv")
    np.savetxt(d / "features.csv", ds.features, fmt="%.17g", delimiter=",")
    np.savetxt(d / "labels.csv", ds.labels.reshape(-1, 1), fmt="%d")
    if ds.has_masks:
        masks = np.stack([ds.train_mask, ds.val_mask, ds.test_mask], axis=1).astype(int)
        np.savetxt(d / "masks.csv", masks, fmt="%d", delimiter=",", header="train,val,test",
                   comments="")
    elif (d / "masks.csv").exists():
        (d / "masks.csv").unlink()


def _read_rows(path, dtype):
    try:
        arr = np.loadtxt(path, delimiter=",", dtype=dtype, ndmin=2)
    except ValueError as exc:
        raise DatasetError(f"{path}: {exc}") from exc
    return arr


def load_dataset(directory) -> NodeDataset:
    d = Path(directory)
    if not d.is_dir():
        raise DatasetError(f"dataset directory {d} does not exist")
    for name in ("edges.tsv", "features.csv", "labels.csv"):
        if not (d / name).exists():
            raise DatasetError(f"{d}: missing {name}")
    graph = load_edge_list(d / "edges.tsv")
    features = _read_rows(d / "features.csv", float)
    labels = _read_rows(d / "labels.csv", np.int64)
    if labels.shape[1] != 1:
        raise DatasetError(f"{d / 'labels.csv'}: expected one column, got {labels.shape[1]}")
    labels = labels[:, 0]
    n = graph.num_nodes
    if features.shape[0] != n:
        raise DatasetError(f"features.csv has {features.shape[0]} rows, graph has {n} nodes")
    if labels.shape[0] != n:
        raise DatasetError(f"labels.csv has {labels.shape[0]} rows, graph has {n} nodes")
    masks = (None, None, None)
    if (d / "masks.csv").exists():
        try:
            m = np.loadtxt(d / "masks.csv", delimiter=",", dtype=np.int64, skiprows=1, ndmin=2)
        except ValueError as exc:
            raise DatasetError(f"{d / 'masks.csv'}: {exc}") from exc
        if m.shape != (n, 3):
            raise DatasetError(f"masks.csv has shape {m.shape}, expected ({n}, 3)")
        masks = tuple(m[:, j].astype(bool) for j in range(3))
    return NodeDataset(graph, features, labels, *masks)

"""Directed graphs, edge-list IO and the self-looped dual-degree normalization.

Orientation convention: ``A[i, j] = 1`` iff the graph has an edge ``j -> i``,
so row ``i`` of the adjacency collects the in-neighbours of ``i`` and
``A @ x`` aggregates messages along edge direction. Pass ``transpose=True``
to :func:`normalized_adjacency` for the opposite reading.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import GraphBoundsError, GraphFormatError

__all__ = [
    "DirectedGraph",
    "load_edge_list",
    "save_edge_list",
    "degrees",
    "normalized_adjacency",
    "normalized_adjacency_sparse",
]


@dataclass(frozen=True)
class DirectedGraph:
    """Immutable directed graph on nodes ``0 .. num_nodes - 1``.

    ``edges`` is an ``(E, 2)`` integer array of ``(source, target)`` rows,
    deduplicated and sorted lexicographically at construction.
    """

    num_nodes: int
    edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = int(self.num_nodes)
        if n < 1:
            raise ValueError(f"num_nodes must be positive, got {self.num_nodes}")
        e = np.asarray(self.edges, dtype=np.int64)
        if e.size == 0:
            e = np.zeros((0, 2), dtype=np.int64)
        if e.ndim != 2 or e.shape[1] != 2:
            raise ValueError(f"edges must have shape (E, 2), got {e.shape}")
        if e.size and (e.min() < 0 or e.max() >= n):
            bad = e[(e < 0).any(axis=1) | (e >= n).any(axis=1)][0]
            raise GraphBoundsError(
                f"edge {tuple(int(v) for v in bad)} out of range for {n} nodes"
            )
        e = np.unique(e, axis=0) if len(e) else e
        e.setflags(write=False)
        object.__setattr__(self, "num_nodes", n)
        object.__setattr__(self, "edges", e)

    @classmethod
    def from_edges(cls, num_nodes, edges):
        return cls(num_nodes, np.asarray(list(edges), dtype=np.int64).reshape(-1, 2))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def sources(self) -> np.ndarray:
        return self.edges[:, 0]

    @property
    def targets(self) -> np.ndarray:
        return self.edges[:, 1]

    def permuted(self, perm) -> "DirectedGraph":
        """Relabel node ``i`` as ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return DirectedGraph(self.num_nodes, perm[self.edges])

    def reversed(self) -> "DirectedGraph":
        return DirectedGraph(self.num_nodes, self.edges[:, ::-1])


def load_edge_list(path) -> DirectedGraph:
    """Read a tab-separated ``src<TAB>dst`` edge list.

    An optional first line ``#nodes N`` fixes the node count; otherwise it
    is ``1 + max id``. Other lines starting with ``#`` and blank lines are
    skipped. Duplicate edges collapse.
    """
    text = Path(path).read_text()
    num_nodes = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if lineno == 1 and line.split()[0] == "#nodes":
                parts = line.split()
                if len(parts) != 2:
                    raise GraphFormatError(f"malformed header {raw!r}", lineno)
                try:
                    num_nodes = int(parts[1])
                except ValueError:
                    raise GraphFormatError(f"malformed header {raw!r}", lineno) from None
                if num_nodes < 1:
                    raise GraphFormatError(f"node count must be positive, got {num_nodes}", lineno)
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise GraphFormatError(f"expected 'src<TAB>dst', got {raw!r}", lineno)
        try:
            src, dst = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer node id in {raw!r}", lineno) from None
        if src < 0 or dst < 0:
            raise GraphFormatError(f"negative node id in {raw!r}", lineno)
        if num_nodes is not None and (src >= num_nodes or dst >= num_nodes):
            raise GraphBoundsError(
                f"line {lineno}: node id out of range for {num_nodes} nodes in {raw!r}"
            )
        pairs.append((src, dst))
    if num_nodes is None:
        if not pairs:
            raise GraphFormatError("empty edge list without '#nodes' header")
        num_nodes = 1 + max(max(p) for p in pairs)
    return DirectedGraph(num_nodes, np.array(pairs, dtype=np.int64).reshape(-1, 2))


def save_edge_list(graph: DirectedGraph, path) -> None:
    lines = [f"#nodes {graph.num_nodes}"]
    lines.extend(f"{s}\t{t}" for s, t in graph.edges)
    Path(path).write_text("\n".join(lines) + "\n")


def degrees(graph: DirectedGraph):
    """Return ``(in_deg, out_deg)`` integer vectors."""
    n = graph.num_nodes
    in_deg = np.bincount(graph.targets, minlength=n).astype(np.int64)
    out_deg = np.bincount(graph.sources, minlength=n).astype(np.int64)
    return in_deg, out_deg


def _normalized_coo(graph: DirectedGraph, transpose: bool):
    n = graph.num_nodes
    # input self-loops are absorbed by the added identity, so they count
    # neither as entries nor towards the degrees
    off = graph.edges[graph.sources != graph.targets]
    in_deg = np.bincount(off[:, 1], minlength=n)
    out_deg = np.bincount(off[:, 0], minlength=n)
    # row = destination, column = source
    rows = np.concatenate([off[:, 1], np.arange(n)])
    cols = np.concatenate([off[:, 0], np.arange(n)])
    d1 = in_deg + 1.0
    d2 = out_deg + 1.0
    vals = 1.0 / np.sqrt(d1[rows] * d2[cols])
    if transpose:
        rows, cols = cols, rows
    return rows, cols, vals


def normalized_adjacency(graph: DirectedGraph, transpose: bool = False) -> np.ndarray:
    """Dense ``(D_in + I)^{-1/2} (A + I) (D_out + I)^{-1/2}``.

    With ``transpose=True`` the edge orientation is flipped, which yields the
    transpose of the default matrix.
    """
    n = graph.num_nodes
    rows, cols, vals = _normalized_coo(graph, transpose)
    a_hat = np.zeros((n, n))
    a_hat[rows, cols] = vals
    return a_hat


def normalized_adjacency_sparse(graph: DirectedGraph, transpose: bool = False) -> sp.csr_matrix:
    """CSR form of :func:`normalized_adjacency` for large graphs."""
    n = graph.num_nodes
    rows, cols, vals = _normalized_coo(graph, transpose)
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    mat.sort_indices()
    return mat

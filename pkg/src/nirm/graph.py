"""Undirected simple graphs, removal masks and connectivity queries."""

from __future__ import annotations

import io
import os
import tempfile
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from nirm import kernels


class ShapeError(ValueError):
    """Raised when a mask or vector does not match the graph size."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph on nodes ``0..n-1``.

    Adjacency is stored as CSR (``indptr``, ``indices``) with each neighbor
    list sorted. ``names`` maps contiguous ids back to the ids read from an
    edge-list file, when the graph came from one.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    names: tuple | None = field(default=None)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], names=None) -> "Graph":
        """Build a graph, dropping self-loops and duplicate edges."""
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError(f"edge endpoint outside 0..{n - 1}")
        arr = arr[arr[:, 0] != arr[:, 1]]
        both = np.concatenate([arr, arr[:, ::-1]])
        both = np.unique(both, axis=0) if len(both) else both.reshape(0, 2)
        counts = np.bincount(both[:, 0], minlength=n) if len(both) else np.zeros(n, np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = np.ascontiguousarray(both[:, 1], dtype=np.int64)
        indptr.setflags(write=False)
        indices.setflags(write=False)
        return cls(int(n), indptr, indices, tuple(names) if names is not None else None)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @cached_property
    def sources(self) -> np.ndarray:
        """Row index of every CSR entry (the edge source, paired with ``indices``)."""
        return np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(i).tolist() for i in range(self.n)]

    def edges(self) -> np.ndarray:
        """Edge array of shape (m, 2) with ``u < v``, lexicographically sorted."""
        src = self.sources
        keep = src < self.indices
        return np.stack([src[keep], self.indices[keep]], axis=1)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges()}

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with node ``i`` renamed to ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return Graph.from_edges(self.n, perm[self.edges()])

    def induced(self, keep: np.ndarray) -> tuple["Graph", np.ndarray]:
        """Subgraph on nodes where ``keep`` is true, relabelled contiguously.

        Returns the subgraph and the original ids of its nodes.
        """
        keep = np.asarray(keep, dtype=bool)
        old = np.flatnonzero(keep)
        new_id = np.full(self.n, -1, dtype=np.int64)
        new_id[old] = np.arange(len(old))
        e = self.edges()
        e = e[keep[e[:, 0]] & keep[e[:, 1]]]
        return Graph.from_edges(len(old), new_id[e]), old

    def is_connected(self) -> bool:
        return self.n > 0 and gcc_size(self) == self.n

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


def empty_mask(g: Graph) -> np.ndarray:
    return np.zeros(g.n, dtype=bool)


def mask_from(g: Graph, removed: Iterable[int]) -> np.ndarray:
    mask = empty_mask(g)
    mask[list(removed)] = True
    return mask


def _removed_u8(g: Graph, mask) -> np.ndarray:
    if mask is None:
        return np.zeros(g.n, dtype=np.uint8)
    mask = np.asarray(mask)
    if mask.shape != (g.n,):
        raise ShapeError(f"mask has shape {mask.shape}, graph has {g.n} nodes")
    return np.ascontiguousarray(mask, dtype=np.uint8)


def gcc_size(g: Graph, mask=None) -> int:
    """Size of the largest connected component among surviving nodes."""
    return kernels.gcc_size(g.indptr, g.indices, _removed_u8(g, mask))


def components(g: Graph, mask=None) -> list[set[int]]:
    """Connected components of the surviving subgraph, ordered by lowest id."""
    labels, sizes = kernels.component_labels(g.indptr, g.indices, _removed_u8(g, mask))
    out = [set() for _ in range(len(sizes))]
    for v, c in enumerate(labels.tolist()):
        if c >= 0:
            out[c].add(v)
    return out


def surviving_degrees(g: Graph, mask=None) -> np.ndarray:
    if mask is None:
        return g.degrees.copy()
    removed = _removed_u8(g, mask).astype(bool)
    alive_nbr = ~removed[g.indices]
    deg = np.bincount(g.sources[alive_nbr], minlength=g.n).astype(np.int64)
    deg[removed] = 0
    return deg


def k_core(g: Graph, mask=None, k: int = 2) -> np.ndarray:
    """Mask marking every node outside the k-core of the surviving subgraph."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = _removed_u8(g, mask).astype(bool)
    deg = surviving_degrees(g, out)
    stack = [v for v in range(g.n) if not out[v] and deg[v] < k]
    for v in stack:
        out[v] = True
    while stack:
        v = stack.pop()
        for w in g.neighbors(v):
            if not out[w]:
                deg[w] -= 1
                if deg[w] < k:
                    out[w] = True
                    stack.append(w)
    return out


def _check_node(g: Graph, i: int) -> None:
    if not 0 <= i < g.n:
        raise IndexError(f"node {i} not in graph with {g.n} nodes")


def two_hop_count(g: Graph, i: int) -> int:
    """Number of nodes at shortest-path distance exactly 2 from ``i``."""
    _check_node(g, i)
    near = {i, *g.neighbors(i).tolist()}
    far = set()
    for j in g.neighbors(i):
        far.update(g.neighbors(j).tolist())
    return len(far - near)


def local_clustering(g: Graph, i: int) -> float:
    _check_node(g, i)
    nbrs = set(g.neighbors(i).tolist())
    d = len(nbrs)
    if d < 2:
        return 0.0
    links = sum(len(nbrs.intersection(g.neighbors(j).tolist())) for j in nbrs)
    return links / (d * (d - 1))


# --- edge-list files -------------------------------------------------------

def parse_edge_list(text: str) -> Graph:
    """Parse ``u v`` lines; ``#``/``%`` lines are comments.

    A line with a single token declares an isolated node; columns after the
    second (weights, timestamps) are ignored. Node tokens are remapped to
    ``0..n-1`` in order of first appearance; tokens that look like integers
    are kept as ints in ``Graph.names``.
    """
    ids: dict = {}
    edges = []

    def node(tok):
        key = int(tok) if tok.lstrip("-").isdigit() else tok
        if key not in ids:
            ids[key] = len(ids)
        return ids[key]

    for line in text.splitlines():
        line = line.strip()
        if not line or line[0] in "#%":
            continue
        parts = line.split()
        if len(parts) == 1:
            node(parts[0])
        else:
            edges.append((node(parts[0]), node(parts[1])))
    return Graph.from_edges(len(ids), edges, names=list(ids))


def read_edge_list(path) -> Graph:
    with open(path) as fh:
        return parse_edge_list(fh.read())


def format_edge_list(g: Graph, header: str | None = None) -> str:
    names = g.names if g.names is not None else range(g.n)
    buf = io.StringIO()
    if header:
        for line in header.splitlines():
            buf.write(f"# {line}\n")
    deg = g.degrees
    for v in range(g.n):
        if deg[v] == 0:
            buf.write(f"{names[v]}\n")
    for u, v in g.edges():
        buf.write(f"{names[u]} {names[v]}\n")
    return buf.getvalue()


def atomic_write(path, text: str) -> None:
    """Write a whole file via a temp file and rename."""
    path = os.fspath(path)
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_edge_list(g: Graph, path, header: str | None = None) -> None:
    atomic_write(path, format_edge_list(g, header))

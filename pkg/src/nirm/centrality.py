"""Classical node rankers and the CoreHD dismantling order.

Every ranker takes ``(g, mask)`` and scores the surviving subgraph; removed
nodes get ``-inf`` so no dismantler ever selects them again.
"""

from __future__ import annotations

import numpy as np

from nirm import kernels
from nirm.graph import Graph, _removed_u8, gcc_size, k_core, surviving_degrees

REMOVED = -np.inf


def _finish(scores, removed):
    scores = np.asarray(scores, dtype=np.float64)
    scores[removed.astype(bool)] = REMOVED
    return scores


def degree_centrality(g: Graph, mask=None) -> np.ndarray:
    removed = _removed_u8(g, mask)
    return _finish(surviving_degrees(g, mask), removed)


def collective_influence(g: Graph, mask=None, radius: int = 2) -> np.ndarray:
    """(d_i - 1) times the sum of (d_j - 1) over the ball surface at ``radius``."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    removed = _removed_u8(g, mask)
    deg, surface = kernels.ball_surface(g.indptr, g.indices, removed, int(radius))
    ci = np.where(deg > 0, (deg - 1) * surface, 0)
    return _finish(ci, removed)


def betweenness(g: Graph, mask=None) -> np.ndarray:
    """Unnormalized shortest-path betweenness over unordered pairs."""
    removed = _removed_u8(g, mask)
    w = np.ones(g.n, dtype=np.float64)
    return _finish(kernels.brandes(g.indptr, g.indices, removed, w) / 2.0, removed)


def closeness(g: Graph, mask=None) -> np.ndarray:
    """(r - 1) / (sum of distances) within each node's component."""
    removed = _removed_u8(g, mask)
    reach, total, _ = kernels.distance_sums(g.indptr, g.indices, removed)
    cc = np.divide(reach, total, out=np.zeros(g.n), where=total > 0)
    return _finish(cc, removed)


def harmonic(g: Graph, mask=None) -> np.ndarray:
    removed = _removed_u8(g, mask)
    _, _, harm = kernels.distance_sums(g.indptr, g.indices, removed)
    return _finish(harm, removed)


def eigenvector(g: Graph, mask=None, tol: float = 1e-10, max_iter: int = 1000) -> np.ndarray:
    """Principal eigenvector of the surviving adjacency, unit L2 norm.

    Iterates with ``A + I`` (same eigenvectors, spectrum shifted positive) so
    bipartite graphs converge instead of oscillating. Edgeless graphs give
    all zeros.
    """
    removed = _removed_u8(g, mask).astype(bool)
    alive = ~removed
    keep = alive[g.sources] & alive[g.indices]
    src, dst = g.sources[keep], g.indices[keep]
    if len(src) == 0:
        return _finish(np.zeros(g.n), removed)
    x = alive.astype(np.float64)
    x /= np.linalg.norm(x)
    for _ in range(max_iter):
        y = x + np.bincount(src, weights=x[dst], minlength=g.n)
        y /= np.linalg.norm(y)
        done = np.max(np.abs(y - x)) < tol
        x = y
        if done:
            break
    return _finish(np.abs(x), removed)


def percolation_centrality(g: Graph, mask=None, states=None) -> np.ndarray:
    """Percolation centrality with per-node states (default all ones).

    PC(v) = 1/(n-2) * sum over ordered (s, r) of sigma_sr(v)/sigma_sr *
    x_s / (sum(x) - x_v), with ``n`` and ``sum(x)`` over surviving nodes.
    """
    removed = _removed_u8(g, mask)
    alive = ~removed.astype(bool)
    n = int(alive.sum())
    x = np.ones(g.n) if states is None else np.asarray(states, dtype=np.float64).copy()
    if x.shape != (g.n,):
        raise ValueError("states must have one entry per node")
    x[~alive] = 0.0
    if n < 3:
        return _finish(np.zeros(g.n), removed)
    dep = kernels.brandes(g.indptr, g.indices, removed, np.ascontiguousarray(x))
    denom = x.sum() - x
    pc = np.divide(dep, denom, out=np.zeros(g.n), where=denom > 0) / (n - 2)
    return _finish(pc, removed)


def top_node(scores: np.ndarray) -> int:
    """Highest score, lowest id on ties."""
    return int(np.argmax(scores))


def ranking(scores: np.ndarray) -> np.ndarray:
    """Node ids by descending score, ties broken by ascending id."""
    return np.lexsort((np.arange(len(scores)), -np.asarray(scores)))


def _tree_break_node(g: Graph, removed: np.ndarray, comp: list[int]) -> int:
    """Node of a tree component whose removal leaves the smallest largest piece."""
    root = comp[0]
    parent = {root: -1}
    order = [root]
    for v in order:
        for w in g.neighbors(v).tolist():
            if not removed[w] and w not in parent:
                parent[w] = v
                order.append(w)
    sub = dict.fromkeys(order, 1)
    biggest_child = dict.fromkeys(order, 0)
    for v in reversed(order):
        p = parent[v]
        if p >= 0:
            sub[p] += sub[v]
            biggest_child[p] = max(biggest_child[p], sub[v])
    total = len(order)
    best, best_v = None, None
    for v in sorted(order):
        piece = max(biggest_child[v], total - sub[v])
        if best is None or piece < best:
            best, best_v = piece, v
    return best_v


def corehd_order(g: Graph, theta: float) -> list[int]:
    """CoreHD: peel the 2-core by highest core degree, then break trees.

    Stops as soon as the largest component is at most ``theta * n``.
    """
    removed = np.zeros(g.n, dtype=bool)
    order: list[int] = []
    limit = theta * g.n + 1e-9

    def done():
        return gcc_size(g, removed) <= limit

    while not done():
        outside = k_core(g, removed, 2)
        if outside.all():
            break
        deg = surviving_degrees(g, outside).astype(np.float64)
        deg[outside] = -1.0
        v = top_node(deg)
        removed[v] = True
        order.append(v)
    while not done():
        labels, sizes = kernels.component_labels(g.indptr, g.indices, removed.astype(np.uint8))
        c = int(np.argmax(sizes))
        comp = np.flatnonzero(labels == c).tolist()
        v = _tree_break_node(g, removed, comp)
        removed[v] = True
        order.append(v)
    return order


RANKERS = {
    "dc": degree_centrality,
    "ci": collective_influence,
    "bc": betweenness,
    "cc": closeness,
    "hc": harmonic,
    "ec": eigenvector,
    "pc": percolation_centrality,
}

"""Pure-Python graph kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
Graphs arrive as CSR arrays (``indptr``, ``indices``) plus a ``removed``
uint8 array; removed nodes are invisible to every kernel.
"""

from collections import deque

import numpy as np

BACKEND = "python"


def component_labels(indptr, indices, removed):
    """Label surviving nodes by connected component.

    Returns ``(labels, sizes)``: ``labels[v]`` is the component index of ``v``
    (-1 when removed), components numbered by their lowest node id.
    """
    n = len(indptr) - 1
    labels = np.full(n, -1, dtype=np.int64)
    sizes = []
    for s in range(n):
        if removed[s] or labels[s] >= 0:
            continue
        c = len(sizes)
        labels[s] = c
        stack = [s]
        size = 0
        while stack:
            v = stack.pop()
            size += 1
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if not removed[w] and labels[w] < 0:
                    labels[w] = c
                    stack.append(w)
        sizes.append(size)
    return labels, np.asarray(sizes, dtype=np.int64)


def gcc_size(indptr, indices, removed):
    _, sizes = component_labels(indptr, indices, removed)
    return int(sizes.max()) if len(sizes) else 0


def removal_gcc_curve(indptr, indices, removed, order):
    """Largest component size after removing each prefix of ``order``.

    Runs union-find in reverse: nodes are re-inserted from the end of
    ``order`` back to the front. ``out[t]`` is the GCC size once the first
    ``t`` nodes of ``order`` are gone, so ``len(out) == len(order) + 1``.
    """
    n = len(indptr) - 1
    order = [int(v) for v in order]
    alive = np.array([not removed[v] for v in range(n)], dtype=bool)
    alive[order] = False
    parent = list(range(n))
    size = [1] * n

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    best = 0
    for v in range(n):
        if not alive[v]:
            continue
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if w < v and alive[w]:
                a, b = find(v), find(w)
                if a != b:
                    if size[a] < size[b]:
                        a, b = b, a
                    parent[b] = a
                    size[a] += size[b]
    for v in range(n):
        if alive[v]:
            best = max(best, size[find(v)])

    out = [0] * (len(order) + 1)
    out[len(order)] = best
    for t in range(len(order) - 1, -1, -1):
        v = order[t]
        alive[v] = True
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if alive[w]:
                a, b = find(v), find(w)
                if a != b:
                    if size[a] < size[b]:
                        a, b = b, a
                    parent[b] = a
                    size[a] += size[b]
        best = max(best, size[find(v)])
        out[t] = best
    return np.asarray(out, dtype=np.int64)


def local_counts(indptr, indices, removed):
    """Per-node two-hop neighbor counts and triangle counts."""
    n = len(indptr) - 1
    two_hop = np.zeros(n, dtype=np.int64)
    tri = np.zeros(n, dtype=np.int64)
    mark = np.full(n, -1, dtype=np.int64)
    for v in range(n):
        if removed[v]:
            continue
        nbrs = [w for w in indices[indptr[v]:indptr[v + 1]] if not removed[w]]
        mark[v] = v
        for w in nbrs:
            mark[w] = v
        count = 0
        links = 0
        for w in nbrs:
            for e in range(indptr[w], indptr[w + 1]):
                u = indices[e]
                if removed[u]:
                    continue
                if mark[u] == v:
                    if u != v:
                        links += 1
                elif mark[u] != -2 - v:
                    mark[u] = -2 - v
                    count += 1
        two_hop[v] = count
        tri[v] = links // 2
    return two_hop, tri


def brandes(indptr, indices, removed, weights):
    """Source-weighted dependency sums: ``out[v] = sum_s w[s] * delta_s(v)``.

    ``delta_s(v)`` is the pair dependency of Brandes' algorithm over ordered
    targets, so unit weights give twice the undirected betweenness.
    """
    n = len(indptr) - 1
    out = np.zeros(n, dtype=np.float64)
    sigma = np.zeros(n, dtype=np.float64)
    dist = np.full(n, -1, dtype=np.int64)
    delta = np.zeros(n, dtype=np.float64)
    for s in range(n):
        if removed[s] or weights[s] == 0.0:
            continue
        stack = []
        sigma[:] = 0.0
        dist[:] = -1
        sigma[s] = 1.0
        dist[s] = 0
        q = deque([s])
        while q:
            v = q.popleft()
            stack.append(v)
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if removed[w]:
                    continue
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    q.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        for v in stack:
            delta[v] = 0.0
        for w in reversed(stack):
            for e in range(indptr[w], indptr[w + 1]):
                v = indices[e]
                if not removed[v] and dist[v] == dist[w] - 1:
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                out[w] += weights[s] * delta[w]
    return out


def distance_sums(indptr, indices, removed):
    """Per node: reachable count (excluding self), distance sum, harmonic sum."""
    n = len(indptr) - 1
    reach = np.zeros(n, dtype=np.int64)
    total = np.zeros(n, dtype=np.int64)
    harm = np.zeros(n, dtype=np.float64)
    dist = np.full(n, -1, dtype=np.int64)
    for s in range(n):
        if removed[s]:
            continue
        dist[:] = -1
        dist[s] = 0
        q = deque([s])
        while q:
            v = q.popleft()
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if not removed[w] and dist[w] < 0:
                    dist[w] = dist[v] + 1
                    reach[s] += 1
                    total[s] += dist[w]
                    harm[s] += 1.0 / dist[w]
                    q.append(w)
    return reach, total, harm


def ball_surface(indptr, indices, removed, radius):
    """Sum of (degree - 1) over surviving nodes at distance exactly ``radius``."""
    n = len(indptr) - 1
    deg = np.zeros(n, dtype=np.int64)
    for v in range(n):
        if not removed[v]:
            deg[v] = sum(1 for w in indices[indptr[v]:indptr[v + 1]] if not removed[w])
    out = np.zeros(n, dtype=np.int64)
    seen = np.full(n, -1, dtype=np.int64)
    for s in range(n):
        if removed[s]:
            continue
        seen[s] = s
        frontier = [s]
        for _ in range(radius):
            nxt = []
            for v in frontier:
                for e in range(indptr[v], indptr[v + 1]):
                    w = indices[e]
                    if not removed[w] and seen[w] != s:
                        seen[w] = s
                        nxt.append(w)
            frontier = nxt
        out[s] = sum(deg[w] - 1 for w in frontier)
    return deg, out


def _large_component(adj, alive, limit):
    """Return the bitmask of the first component larger than ``limit``, or 0."""
    rest = alive
    while rest:
        seed = rest & -rest
        comp = seed
        frontier = seed
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            new = adj[low.bit_length() - 1] & alive & ~comp
            comp |= new
            frontier |= new
        if bin(comp).count("1") > limit:
            return comp
        rest &= ~comp
    return 0


def _witness(adj, alive, comp, forbidden, size):
    """First ``size`` nodes, in BFS order, of a component (a connected set)."""
    start_bits = comp & forbidden
    start_bits = start_bits if start_bits else comp
    start = (start_bits & -start_bits).bit_length() - 1
    order = [start]
    seen = 1 << start
    head = 0
    while len(order) < size:
        v = order[head]
        head += 1
        nbrs = adj[v] & alive & ~seen
        while nbrs and len(order) < size:
            low = nbrs & -nbrs
            nbrs ^= low
            seen |= low
            order.append(low.bit_length() - 1)
    return order


def min_tas_search(adj, n, limit, k):
    """All removal sets of size <= ``k`` leaving every component <= ``limit``.

    ``adj`` holds one neighbor bitmask per node. Branches on a connected
    witness set of ``limit + 1`` nodes that any valid set must hit; fixing the
    first hit node and forbidding earlier witness nodes makes every set
    appear exactly once. Callers raise ``k`` from 0 so that the first nonempty
    result is exactly the minimum sets. Returns bitmasks.
    """
    full = (1 << n) - 1
    found = []

    def rec(chosen, forbidden, budget):
        alive = full & ~chosen
        comp = _large_component(adj, alive, limit)
        if not comp:
            found.append(chosen)
            return
        if budget == 0:
            return
        blocked = forbidden
        for v in _witness(adj, alive, comp, forbidden, limit + 1):
            bit = 1 << v
            if forbidden & bit:
                continue
            rec(chosen | bit, blocked, budget - 1)
            blocked |= bit

    rec(0, 0, k)
    return found

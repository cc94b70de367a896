# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels; same contracts as ``nirm._pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t, uint64_t

from nirm import _pykernels

cnp.import_array()

BACKEND = "cython"


def component_labels(const int64_t[::1] indptr, const int64_t[::1] indices,
                     const uint8_t[::1] removed):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    labels_arr = np.full(n, -1, dtype=np.int64)
    stack_arr = np.empty(max(n, 1), dtype=np.int64)
    cdef int64_t[::1] labels = labels_arr
    cdef int64_t[::1] stack = stack_arr
    cdef Py_ssize_t s, top, e, v, w
    cdef int64_t c = 0, size
    sizes = []
    for s in range(n):
        if removed[s] or labels[s] >= 0:
            continue
        labels[s] = c
        stack[0] = s
        top = 1
        size = 0
        while top > 0:
            top -= 1
            v = stack[top]
            size += 1
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if not removed[w] and labels[w] < 0:
                    labels[w] = c
                    stack[top] = w
                    top += 1
        sizes.append(size)
        c += 1
    return labels_arr, np.asarray(sizes, dtype=np.int64)


def gcc_size(const int64_t[::1] indptr, const int64_t[::1] indices,
             const uint8_t[::1] removed):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    seen_arr = np.zeros(max(n, 1), dtype=np.uint8)
    stack_arr = np.empty(max(n, 1), dtype=np.int64)
    cdef uint8_t[::1] seen = seen_arr
    cdef int64_t[::1] stack = stack_arr
    cdef Py_ssize_t s, top, e, v, w
    cdef int64_t size, best = 0
    for s in range(n):
        if removed[s] or seen[s]:
            continue
        seen[s] = 1
        stack[0] = s
        top = 1
        size = 0
        while top > 0:
            top -= 1
            v = stack[top]
            size += 1
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if not removed[w] and not seen[w]:
                    seen[w] = 1
                    stack[top] = w
                    top += 1
        if size > best:
            best = size
    return int(best)


cdef inline int64_t _find(int64_t[::1] parent, int64_t x) noexcept nogil:
    cdef int64_t root = x, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


cdef inline int64_t _union(int64_t[::1] parent, int64_t[::1] size,
                           int64_t a, int64_t b) noexcept nogil:
    cdef int64_t t
    a = _find(parent, a)
    b = _find(parent, b)
    if a == b:
        return size[a]
    if size[a] < size[b]:
        t = a
        a = b
        b = t
    parent[b] = a
    size[a] += size[b]
    return size[a]


def removal_gcc_curve(const int64_t[::1] indptr, const int64_t[::1] indices,
                      const uint8_t[::1] removed, order):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    order_arr = np.ascontiguousarray(order, dtype=np.int64)
    cdef int64_t[::1] od = order_arr
    cdef Py_ssize_t L = od.shape[0]
    alive_arr = np.zeros(max(n, 1), dtype=np.uint8)
    parent_arr = np.arange(max(n, 1), dtype=np.int64)
    size_arr = np.ones(max(n, 1), dtype=np.int64)
    out_arr = np.zeros(L + 1, dtype=np.int64)
    cdef uint8_t[::1] alive = alive_arr
    cdef int64_t[::1] parent = parent_arr
    cdef int64_t[::1] size = size_arr
    cdef int64_t[::1] out = out_arr
    cdef Py_ssize_t v, e, t
    cdef int64_t w, best = 0, s
    for v in range(n):
        alive[v] = 0 if removed[v] else 1
    for t in range(L):
        alive[od[t]] = 0
    for v in range(n):
        if not alive[v]:
            continue
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if w < v and alive[w]:
                _union(parent, size, v, w)
    for v in range(n):
        if alive[v]:
            s = size[_find(parent, v)]
            if s > best:
                best = s
    out[L] = best
    for t in range(L - 1, -1, -1):
        v = od[t]
        alive[v] = 1
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if alive[w]:
                _union(parent, size, v, w)
        s = size[_find(parent, v)]
        if s > best:
            best = s
        out[t] = best
    return out_arr


def local_counts(const int64_t[::1] indptr, const int64_t[::1] indices,
                 const uint8_t[::1] removed):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    two_arr = np.zeros(n, dtype=np.int64)
    tri_arr = np.zeros(n, dtype=np.int64)
    mark_arr = np.full(max(n, 1), -1, dtype=np.int64)
    cdef int64_t[::1] two_hop = two_arr
    cdef int64_t[::1] tri = tri_arr
    cdef int64_t[::1] mark = mark_arr
    cdef Py_ssize_t v, e, f
    cdef int64_t w, u, count, links
    for v in range(n):
        if removed[v]:
            continue
        mark[v] = v
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if not removed[w]:
                mark[w] = v
        count = 0
        links = 0
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if removed[w]:
                continue
            for f in range(indptr[w], indptr[w + 1]):
                u = indices[f]
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
    return two_arr, tri_arr


def brandes(const int64_t[::1] indptr, const int64_t[::1] indices,
            const uint8_t[::1] removed, const double[::1] weights):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    m = max(n, 1)
    out_arr = np.zeros(n, dtype=np.float64)
    sigma_arr = np.zeros(m, dtype=np.float64)
    delta_arr = np.zeros(m, dtype=np.float64)
    dist_arr = np.full(m, -1, dtype=np.int64)
    queue_arr = np.empty(m, dtype=np.int64)
    cdef double[::1] out = out_arr
    cdef double[::1] sigma = sigma_arr
    cdef double[::1] delta = delta_arr
    cdef int64_t[::1] dist = dist_arr
    cdef int64_t[::1] queue = queue_arr
    cdef Py_ssize_t s, head, tail, i, e, v, w
    with nogil:
        for s in range(n):
            if removed[s] or weights[s] == 0.0:
                continue
            sigma[s] = 1.0
            dist[s] = 0
            queue[0] = s
            head = 0
            tail = 1
            while head < tail:
                v = queue[head]
                head += 1
                for e in range(indptr[v], indptr[v + 1]):
                    w = indices[e]
                    if removed[w]:
                        continue
                    if dist[w] < 0:
                        dist[w] = dist[v] + 1
                        queue[tail] = w
                        tail += 1
                    if dist[w] == dist[v] + 1:
                        sigma[w] += sigma[v]
            for i in range(tail - 1, -1, -1):
                w = queue[i]
                for e in range(indptr[w], indptr[w + 1]):
                    v = indices[e]
                    if not removed[v] and dist[v] == dist[w] - 1:
                        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
                if w != s:
                    out[w] += weights[s] * delta[w]
            for i in range(tail):
                w = queue[i]
                sigma[w] = 0.0
                delta[w] = 0.0
                dist[w] = -1
    return out_arr


def distance_sums(const int64_t[::1] indptr, const int64_t[::1] indices,
                  const uint8_t[::1] removed):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    m = max(n, 1)
    reach_arr = np.zeros(n, dtype=np.int64)
    total_arr = np.zeros(n, dtype=np.int64)
    harm_arr = np.zeros(n, dtype=np.float64)
    dist_arr = np.full(m, -1, dtype=np.int64)
    queue_arr = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] reach = reach_arr
    cdef int64_t[::1] total = total_arr
    cdef double[::1] harm = harm_arr
    cdef int64_t[::1] dist = dist_arr
    cdef int64_t[::1] queue = queue_arr
    cdef Py_ssize_t s, head, tail, i, e, v, w
    with nogil:
        for s in range(n):
            if removed[s]:
                continue
            dist[s] = 0
            queue[0] = s
            head = 0
            tail = 1
            while head < tail:
                v = queue[head]
                head += 1
                for e in range(indptr[v], indptr[v + 1]):
                    w = indices[e]
                    if not removed[w] and dist[w] < 0:
                        dist[w] = dist[v] + 1
                        reach[s] += 1
                        total[s] += dist[w]
                        harm[s] += 1.0 / dist[w]
                        queue[tail] = w
                        tail += 1
            for i in range(tail):
                dist[queue[i]] = -1
    return reach_arr, total_arr, harm_arr


def ball_surface(const int64_t[::1] indptr, const int64_t[::1] indices,
                 const uint8_t[::1] removed, int radius):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    m = max(n, 1)
    deg_arr = np.zeros(n, dtype=np.int64)
    out_arr = np.zeros(n, dtype=np.int64)
    dist_arr = np.full(m, -1, dtype=np.int64)
    queue_arr = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] deg = deg_arr
    cdef int64_t[::1] out = out_arr
    cdef int64_t[::1] dist = dist_arr
    cdef int64_t[::1] queue = queue_arr
    cdef Py_ssize_t s, head, tail, i, e, v, w
    cdef int64_t acc
    with nogil:
        for v in range(n):
            if removed[v]:
                continue
            for e in range(indptr[v], indptr[v + 1]):
                if not removed[indices[e]]:
                    deg[v] += 1
        for s in range(n):
            if removed[s]:
                continue
            dist[s] = 0
            queue[0] = s
            head = 0
            tail = 1
            acc = 0
            while head < tail:
                v = queue[head]
                head += 1
                if dist[v] == radius:
                    acc += deg[v] - 1
                    continue
                for e in range(indptr[v], indptr[v + 1]):
                    w = indices[e]
                    if not removed[w] and dist[w] < 0:
                        dist[w] = dist[v] + 1
                        queue[tail] = w
                        tail += 1
            out[s] = acc
            for i in range(tail):
                dist[queue[i]] = -1
    return deg_arr, out_arr


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int _popcount(uint64_t x) noexcept nogil:
    return __builtin_popcountll(x)


cdef inline int _ctz(uint64_t x) noexcept nogil:
    return __builtin_ctzll(x)


cdef uint64_t _large_component(const uint64_t* adj, uint64_t alive,
                               int limit) noexcept nogil:
    cdef uint64_t rest = alive, comp, frontier, low, new
    while rest:
        comp = rest & (~rest + 1)
        frontier = comp
        while frontier:
            low = frontier & (~frontier + 1)
            frontier ^= low
            new = adj[_ctz(low)] & alive & ~comp
            comp |= new
            frontier |= new
        if _popcount(comp) > limit:
            return comp
        rest &= ~comp
    return 0


cdef int _witness(const uint64_t* adj, uint64_t alive, uint64_t comp,
                  uint64_t forbidden, int size, int* order) noexcept nogil:
    cdef uint64_t start_bits = comp & forbidden, seen, nbrs, low
    cdef int count, head, v
    if not start_bits:
        start_bits = comp
    order[0] = _ctz(start_bits)
    seen = (<uint64_t>1) << order[0]
    count = 1
    head = 0
    while count < size:
        v = order[head]
        head += 1
        nbrs = adj[v] & alive & ~seen
        while nbrs and count < size:
            low = nbrs & (~nbrs + 1)
            nbrs ^= low
            seen |= low
            order[count] = _ctz(low)
            count += 1
    return count


cdef void _search(const uint64_t* adj, uint64_t full, int limit,
                  uint64_t chosen, uint64_t forbidden, int budget,
                  list found):
    cdef uint64_t alive = full & ~chosen
    cdef uint64_t comp = _large_component(adj, alive, limit)
    cdef uint64_t blocked, bit
    cdef int order[65]
    cdef int count, i
    if not comp:
        found.append(chosen)
        return
    if budget == 0:
        return
    count = _witness(adj, alive, comp, forbidden, limit + 1, order)
    blocked = forbidden
    for i in range(count):
        bit = (<uint64_t>1) << order[i]
        if forbidden & bit:
            continue
        _search(adj, full, limit, chosen | bit, blocked, budget - 1, found)
        blocked |= bit


def min_tas_search(adj, int n, int limit, int k):
    if n > 64:
        return _pykernels.min_tas_search(adj, n, limit, k)
    adj_arr = np.asarray([int(a) for a in adj] or [0], dtype=np.uint64)
    cdef uint64_t[::1] abits = adj_arr
    cdef uint64_t full = ((<uint64_t>1) << n) - 1 if n < 64 else ~(<uint64_t>0)
    found = []
    _search(&abits[0], full, limit, 0, 0, k, found)
    return [int(x) for x in found]

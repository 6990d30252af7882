# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels. Same contracts as ``_pykernels``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


def bfs_distance_stats(const i64[::1] indptr, const i64[::1] indices):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef i64[::1] dist = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] queue = np.empty(max(n, 1), dtype=np.int64)
    cdef Py_ssize_t s, head, tail, k, q
    cdef i64 u, v, du
    cdef i64 total = 0, pairs = 0, longest = 0
    for s in range(n):
        if indptr[s] == indptr[s + 1]:
            continue
        head = 0
        tail = 1
        queue[0] = s
        dist[s] = 0
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u] + 1
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if dist[v] < 0:
                    dist[v] = du
                    queue[tail] = v
                    tail += 1
                    total += du
                    pairs += 1
                    if du > longest:
                        longest = du
        for q in range(tail):
            dist[queue[q]] = -1
    return int(total), int(pairs), int(longest)


def triangles_per_node(const i64[::1] indptr, const i64[::1] indices):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out_arr = np.zeros(n, dtype=np.int64)
    cdef i64[::1] out = out_arr
    cdef i64[::1] mark = np.full(n, -1, dtype=np.int64)
    cdef Py_ssize_t u, k, k2
    cdef i64 v, w
    for u in range(n):
        for k in range(indptr[u], indptr[u + 1]):
            mark[indices[k]] = u
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if v <= u:
                continue
            for k2 in range(indptr[v], indptr[v + 1]):
                w = indices[k2]
                if w > v and mark[w] == u:
                    out[u] += 1
                    out[v] += 1
                    out[w] += 1
    return out_arr


cdef inline bint _contains(const i64[::1] indptr, const i64[::1] indices, i64 node, i64 x) nogil:
    cdef Py_ssize_t lo = indptr[node], hi = indptr[node + 1], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if indices[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo < indptr[node + 1] and indices[lo] == x


cdef inline i64 _common(const i64[::1] indptr, const i64[::1] indices, i64 a, i64 b) nogil:
    cdef Py_ssize_t p = indptr[a], pe = indptr[a + 1]
    cdef Py_ssize_t q = indptr[b], qe = indptr[b + 1]
    cdef i64 c = 0
    while p < pe and q < qe:
        if indices[p] < indices[q]:
            p += 1
        elif indices[p] > indices[q]:
            q += 1
        else:
            c += 1
            p += 1
            q += 1
    return c


def edge_pair_similarities(const i64[::1] indptr, const i64[::1] indices,
                           const i64[::1] edge_of):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t total = 0, k, a, b, base, d, pos = 0
    for k in range(n):
        d = indptr[k + 1] - indptr[k]
        total += d * (d - 1) // 2
    first_arr = np.empty(total, dtype=np.int64)
    second_arr = np.empty(total, dtype=np.int64)
    sim_arr = np.empty(total, dtype=np.float64)
    cdef i64[::1] first = first_arr
    cdef i64[::1] second = second_arr
    cdef double[::1] sim = sim_arr
    cdef i64 i, j, ea, eb, inter, union
    for k in range(n):
        base = indptr[k]
        d = indptr[k + 1] - base
        for a in range(d):
            i = indices[base + a]
            ea = edge_of[base + a]
            for b in range(a + 1, d):
                j = indices[base + b]
                eb = edge_of[base + b]
                inter = _common(indptr, indices, i, j)
                if _contains(indptr, indices, i, j):
                    inter += 2
                union = (indptr[i + 1] - indptr[i]) + (indptr[j + 1] - indptr[j]) + 2 - inter
                if ea < eb:
                    first[pos] = ea
                    second[pos] = eb
                else:
                    first[pos] = eb
                    second[pos] = ea
                sim[pos] = <double>inter / <double>union
                pos += 1
    return first_arr, second_arr, sim_arr


cdef inline i64 _find(i64[::1] parent, i64 x) nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def weak_components(Py_ssize_t n, const i64[::1] src, const i64[::1] dst):
    labels = np.arange(n, dtype=np.int64)
    cdef i64[::1] parent = labels
    cdef Py_ssize_t k, m = src.shape[0]
    cdef i64 ru, rv
    for k in range(m):
        ru = _find(parent, src[k])
        rv = _find(parent, dst[k])
        if ru != rv:
            if ru < rv:
                parent[rv] = ru
            else:
                parent[ru] = rv
    for k in range(n):
        parent[k] = _find(parent, k)
    return labels

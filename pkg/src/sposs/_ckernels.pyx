# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels (see _kernels_py for the reference semantics)."""

import numpy as np

cimport numpy as cnp

IS_COMPILED = True


def uniform_opt(cnp.int32_t[::1] order, cnp.float64_t[::1] w,
                cnp.uint8_t[::1] active, int r):
    cdef Py_ssize_t i, n = order.shape[0]
    cdef int e, taken = 0
    cdef double val = 0.0
    chosen = []
    for i in range(n):
        e = order[i]
        if active[e]:
            chosen.append(e)
            val += w[e]
            taken += 1
            if taken >= r:
                break
    return val, chosen


def partition_opt(cnp.int32_t[::1] order, cnp.float64_t[::1] w,
                  cnp.uint8_t[::1] active, cnp.int32_t[::1] block,
                  cnp.int64_t[::1] caps):
    cdef Py_ssize_t i, n = order.shape[0]
    cdef int e, b
    cdef double val = 0.0
    cdef cnp.int64_t[::1] remaining = np.array(caps, dtype=np.int64, copy=True)
    chosen = []
    for i in range(n):
        e = order[i]
        if active[e]:
            b = block[e]
            if remaining[b] > 0:
                remaining[b] -= 1
                chosen.append(e)
                val += w[e]
    return val, chosen


cdef int _find(cnp.int32_t[::1] parent, int x):
    cdef int root = x, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def graphic_opt(cnp.int32_t[::1] order, cnp.float64_t[::1] w,
                cnp.uint8_t[::1] active, cnp.int32_t[::1] eu,
                cnp.int32_t[::1] ev, int n_vertices):
    cdef Py_ssize_t i, n = order.shape[0]
    cdef int e, u, v, ru, rv
    cdef double val = 0.0
    cdef cnp.int32_t[::1] parent = np.arange(n_vertices, dtype=np.int32)
    chosen = []
    for i in range(n):
        e = order[i]
        if not active[e]:
            continue
        u = eu[e]
        v = ev[e]
        if u == v:
            continue
        ru = _find(parent, u)
        rv = _find(parent, v)
        if ru != rv:
            parent[ru] = rv
            chosen.append(e)
            val += w[e]
    return val, chosen


cdef struct _BnbState:
    double best_val


cdef void _matching_dfs(Py_ssize_t i, double val, Py_ssize_t m,
                        cnp.int32_t[::1] cand, cnp.float64_t[::1] w,
                        cnp.int32_t[::1] eu, cnp.int32_t[::1] ev,
                        cnp.float64_t[::1] suffix, cnp.uint8_t[::1] used,
                        cnp.uint8_t[::1] cur, cnp.uint8_t[::1] best,
                        _BnbState* st):
    cdef int e, u, v
    cdef Py_ssize_t j
    if val > st.best_val:
        st.best_val = val
        for j in range(m):
            best[j] = cur[j]
    if i >= m or val + suffix[i] <= st.best_val:
        return
    e = cand[i]
    u = eu[e]
    v = ev[e]
    if used[u] == 0 and used[v] == 0:
        used[u] = 1
        used[v] = 1
        cur[i] = 1
        _matching_dfs(i + 1, val + w[e], m, cand, w, eu, ev, suffix, used,
                      cur, best, st)
        cur[i] = 0
        used[u] = 0
        used[v] = 0
    _matching_dfs(i + 1, val, m, cand, w, eu, ev, suffix, used, cur, best, st)


def matching_opt(cnp.int32_t[::1] order, cnp.float64_t[::1] w,
                 cnp.uint8_t[::1] active, cnp.int32_t[::1] eu,
                 cnp.int32_t[::1] ev, int n_vertices):
    cdef Py_ssize_t i, n = order.shape[0]
    cdef int e
    cand_list = []
    for i in range(n):
        e = order[i]
        if active[e] and eu[e] != ev[e]:
            cand_list.append(e)
    cdef Py_ssize_t m = len(cand_list)
    if m == 0:
        return 0.0, []
    cdef cnp.int32_t[::1] cand = np.array(cand_list, dtype=np.int32)
    cdef cnp.float64_t[::1] suffix = np.zeros(m + 1)
    for i in range(m - 1, -1, -1):
        suffix[i] = suffix[i + 1] + w[cand[i]]
    cdef cnp.uint8_t[::1] used = np.zeros(n_vertices, dtype=np.uint8)
    cdef cnp.uint8_t[::1] cur = np.zeros(m, dtype=np.uint8)
    cdef cnp.uint8_t[::1] best = np.zeros(m, dtype=np.uint8)
    cdef _BnbState st
    st.best_val = 0.0
    _matching_dfs(0, 0.0, m, cand, w, eu, ev, suffix, used, cur, best, &st)
    chosen = [int(cand[i]) for i in range(m) if best[i]]
    return st.best_val, chosen

"""Pure-Python reference implementations of the hot numeric kernels.

These mirror sposs._ckernels exactly; sposs._core picks whichever is
available (or forces this module when SPOSS_PURE_PYTHON is set).  All
kernels take an `order` array of element ids pre-sorted by descending
weight with ties broken by ascending id, and an `active` 0/1 mask.
"""

from __future__ import annotations

IS_COMPILED = False


def uniform_opt(order, w, active, r):
    """Greedy optimum for a rank-r uniform matroid restricted to active ids."""
    val = 0.0
    chosen = []
    for e in order:
        e = int(e)
        if active[e]:
            chosen.append(e)
            val += float(w[e])
            if len(chosen) >= r:
                break
    return val, chosen


def partition_opt(order, w, active, block, caps):
    """Greedy optimum for a partition matroid with per-block capacities."""
    remaining = [int(c) for c in caps]
    val = 0.0
    chosen = []
    for e in order:
        e = int(e)
        if active[e]:
            b = int(block[e])
            if remaining[b] > 0:
                remaining[b] -= 1
                chosen.append(e)
                val += float(w[e])
    return val, chosen


def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def graphic_opt(order, w, active, eu, ev, n_vertices):
    """Greedy (Kruskal) optimum for a graphic matroid; self-loops are skipped."""
    parent = list(range(n_vertices))
    val = 0.0
    chosen = []
    for e in order:
        e = int(e)
        if not active[e]:
            continue
        u, v = int(eu[e]), int(ev[e])
        if u == v:
            continue
        ru, rv = _find(parent, u), _find(parent, v)
        if ru != rv:
            parent[ru] = rv
            chosen.append(e)
            val += float(w[e])
    return val, chosen


def matching_opt(order, w, active, eu, ev, n_vertices):
    """Exact max-weight matching over the active edges by branch and bound.

    Edges are explored in descending weight order; the bound is the sum of
    all still-unconsidered candidate weights.
    """
    cand = [int(e) for e in order if active[int(e)] and eu[int(e)] != ev[int(e)]]
    m = len(cand)
    if m == 0:
        return 0.0, []
    suffix = [0.0] * (m + 1)
    for i in range(m - 1, -1, -1):
        suffix[i] = suffix[i + 1] + float(w[cand[i]])
    used = bytearray(n_vertices)
    best_val = 0.0
    best_set: list = []
    cur: list = []

    def dfs(i: int, val: float) -> None:
        nonlocal best_val, best_set
        if val > best_val:
            best_val = val
            best_set = cur.copy()
        if i >= m or val + suffix[i] <= best_val:
            return
        e = cand[i]
        u, v = int(eu[e]), int(ev[e])
        if not used[u] and not used[v]:
            used[u] = used[v] = 1
            cur.append(e)
            dfs(i + 1, val + float(w[e]))
            cur.pop()
            used[u] = used[v] = 0
        dfs(i + 1, val)

    dfs(0, 0.0)
    return best_val, best_set

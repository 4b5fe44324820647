"""Downward-closed feasibility systems and exact small-instance optimizers.

Five kinds: a single matroid, an intersection of k matroids, matchings of
a graph (elements are edges), the rank-one system, and the block system
(feasible sets live inside a single block).  Each kind knows how to solve
max-weight feasible subset exactly at desk scale; the exponential solvers
refuse candidate sets above EXACT_CAP elements.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._core import kernels
from .errors import DomainError, KindError, PreconditionError, SizeLimitError
from .matroids import Matroid, weight_getter

EXACT_CAP = 22
RANK_EXACT_CAP = 20


@dataclass(frozen=True)
class FeasibleSet:
    elements: frozenset
    weight: float


def _sorted_by_weight(elements, wf):
    return sorted(elements, key=lambda e: (-wf(e), e))


class SetSystem:
    """Base class; concrete kinds implement is_feasible and the optimizers."""

    kind = "abstract"
    ground: tuple = ()

    def __init__(self):
        self._rank = None
        self.rank_exact = True

    def _check_domain(self, s) -> frozenset:
        fs = frozenset(s)
        gs = frozenset(self.ground)
        if not fs <= gs:
            raise DomainError(f"elements {sorted(fs - gs)} outside ground set")
        return fs

    def is_feasible(self, s) -> bool:
        raise NotImplementedError

    def _compute_rank(self) -> int:
        raise NotImplementedError

    def rank(self) -> int:
        if self._rank is None:
            self._rank = self._compute_rank()
        return self._rank

    def max_weight_feasible(self, w, s) -> FeasibleSet:
        raise NotImplementedError

    def prepare_additive(self, w):
        """Return fn(active_mask) -> (value, chosen_ids) for repeated solves.

        active_mask is a uint8 array indexed by element id.  The default
        implementation round-trips through max_weight_feasible; kinds with
        compiled kernels override it.
        """

        def solve(mask):
            fs = self.max_weight_feasible(
                w, frozenset(int(e) for e in np.flatnonzero(mask))
            )
            return fs.weight, sorted(fs.elements)

        return solve

    def _as_arrays(self, w):
        n = (max(self.ground) + 1) if self.ground else 0
        warr = np.zeros(n)
        for e in self.ground:
            warr[e] = weight_getter(w)(e)
        order = np.array(
            _sorted_by_weight(self.ground, lambda e: warr[e]), dtype=np.int32
        )
        return warr, order


class MatroidSystem(SetSystem):
    kind = "matroid"

    def __init__(self, matroid: Matroid):
        super().__init__()
        self.matroid = matroid
        self.ground = matroid.ground

    def is_feasible(self, s) -> bool:
        return self.matroid.is_independent(self._check_domain(s))

    def _compute_rank(self) -> int:
        return self.matroid.rank()

    def max_weight_feasible(self, w, s) -> FeasibleSet:
        fs = self._check_domain(s)
        wf = weight_getter(w)
        chosen = set()
        base = set(self.matroid.contracted)
        for e in _sorted_by_weight(fs, wf):
            if self.matroid.family.independent(frozenset(base | {e})):
                base.add(e)
                chosen.add(e)
        return FeasibleSet(frozenset(chosen), float(sum(wf(e) for e in chosen)))

    def prepare_additive(self, w):
        m = self.matroid
        fam = m.family
        if m.is_base_view and fam.kind in ("uniform", "partition", "graphic"):
            warr, order = self._as_arrays(w)
            if fam.kind == "uniform":
                r = fam.r
                return lambda mask: kernels.uniform_opt(order, warr, mask, r)
            if fam.kind == "partition":
                block = np.zeros(len(warr), dtype=np.int32)
                for e in fam.ground:
                    block[e] = fam._block_of[e]
                caps = np.array(fam.caps, dtype=np.int64)
                return lambda mask: kernels.partition_opt(
                    order, warr, mask, block, caps
                )
            eu = np.array([u for u, _ in fam.edges], dtype=np.int32)
            ev = np.array([v for _, v in fam.edges], dtype=np.int32)
            nv = fam.n_vertices
            return lambda mask: kernels.graphic_opt(order, warr, mask, eu, ev, nv)
        return super().prepare_additive(w)


class IntersectionSystem(SetSystem):
    kind = "intersection"

    def __init__(self, matroids):
        super().__init__()
        self.matroids = tuple(matroids)
        if not self.matroids:
            raise PreconditionError("intersection needs at least one matroid")
        g = self.matroids[0].ground
        for m in self.matroids[1:]:
            if m.ground != g:
                raise PreconditionError("all matroids must share the ground set")
        self.ground = g

    def is_feasible(self, s) -> bool:
        fs = self._check_domain(s)
        return all(m.is_independent(fs) for m in self.matroids)

    def _feasible_unchecked(self, fs) -> bool:
        return all(m.is_independent(fs) for m in self.matroids)

    def _branch_and_bound(self, wf, candidates):
        cand = _sorted_by_weight(candidates, wf)
        suffix = [0.0] * (len(cand) + 1)
        for i in range(len(cand) - 1, -1, -1):
            suffix[i] = suffix[i + 1] + wf(cand[i])
        best = [0.0, frozenset()]
        cur: set = set()

        def dfs(i, val):
            if val > best[0]:
                best[0], best[1] = val, frozenset(cur)
            if i >= len(cand) or val + suffix[i] <= best[0]:
                return
            e = cand[i]
            trial = frozenset(cur | {e})
            if self._feasible_unchecked(trial):
                cur.add(e)
                dfs(i + 1, val + wf(e))
                cur.remove(e)
            dfs(i + 1, val)

        dfs(0, 0.0)
        return FeasibleSet(best[1], best[0])

    def _compute_rank(self) -> int:
        if len(self.ground) <= RANK_EXACT_CAP:
            return len(
                self._branch_and_bound(lambda e: 1.0, self.ground).elements
            )
        self.rank_exact = False
        chosen: set = set()
        for e in self.ground:
            if self._feasible_unchecked(frozenset(chosen | {e})):
                chosen.add(e)
        return len(chosen)

    def max_weight_feasible(self, w, s) -> FeasibleSet:
        fs = self._check_domain(s)
        if len(fs) > EXACT_CAP:
            raise SizeLimitError(
                f"exact intersection solver capped at {EXACT_CAP} candidates"
            )
        return self._branch_and_bound(weight_getter(w), fs)

    def greedy_feasible(self, w, s) -> FeasibleSet:
        """1/k-approximate greedy alternative (flagged, never the default)."""
        fs = self._check_domain(s)
        wf = weight_getter(w)
        chosen: set = set()
        for e in _sorted_by_weight(fs, wf):
            if self._feasible_unchecked(frozenset(chosen | {e})):
                chosen.add(e)
        return FeasibleSet(frozenset(chosen), float(sum(wf(e) for e in chosen)))


class MatchingSystem(SetSystem):
    kind = "matching"

    def __init__(self, n_vertices: int, edges):
        super().__init__()
        self.n_vertices = int(n_vertices)
        self.edges = tuple((int(u), int(v)) for u, v in edges)
        for u, v in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise PreconditionError("edge endpoint outside vertex range")
        self.ground = tuple(range(len(self.edges)))
        self._eu = np.array([u for u, _ in self.edges], dtype=np.int32)
        self._ev = np.array([v for _, v in self.edges], dtype=np.int32)
        self.bipartite, self._color = self._two_color()

    def _two_color(self):
        color = [-1] * self.n_vertices
        for start in range(self.n_vertices):
            if color[start] != -1:
                continue
            color[start] = 0
            queue = [start]
            while queue:
                u = queue.pop()
                for a, b in self.edges:
                    for x, y in ((a, b), (b, a)):
                        if x == u and x != y:
                            if color[y] == -1:
                                color[y] = 1 - color[u]
                                queue.append(y)
                            elif color[y] == color[u]:
                                return False, None
        return True, color

    def is_feasible(self, s) -> bool:
        fs = self._check_domain(s)
        seen = set()
        for e in fs:
            u, v = self.edges[e]
            if u == v or u in seen or v in seen:
                return False
            seen.add(u)
            seen.add(v)
        return True

    def _compute_rank(self) -> int:
        if self.bipartite or len(self.ground) <= RANK_EXACT_CAP:
            return len(self.max_weight_feasible([1.0] * len(self.edges),
                                                self.ground).elements)
        self.rank_exact = False
        chosen: set = set()
        seen: set = set()
        for e in self.ground:
            u, v = self.edges[e]
            if u != v and u not in seen and v not in seen:
                chosen.add(e)
                seen.update((u, v))
        return len(chosen)

    def _assignment(self, wf, fs) -> FeasibleSet:
        from scipy.optimize import linear_sum_assignment

        left = sorted({self.edges[e][0] if self._color[self.edges[e][0]] == 0
                       else self.edges[e][1] for e in fs})
        right = sorted({self.edges[e][1] if self._color[self.edges[e][0]] == 0
                        else self.edges[e][0] for e in fs})
        li = {v: i for i, v in enumerate(left)}
        ri = {v: i for i, v in enumerate(right)}
        cost = np.zeros((len(left), len(right)))
        best_edge = -np.ones((len(left), len(right)), dtype=np.int64)
        for e in sorted(fs):
            u, v = self.edges[e]
            if self._color[u] != 0:
                u, v = v, u
            i, j = li[u], ri[v]
            if wf(e) > cost[i, j]:
                cost[i, j] = wf(e)
                best_edge[i, j] = e
        rows, cols = linear_sum_assignment(cost, maximize=True)
        chosen = frozenset(
            int(best_edge[i, j])
            for i, j in zip(rows, cols)
            if cost[i, j] > 0 and best_edge[i, j] >= 0
        )
        return FeasibleSet(chosen, float(sum(wf(e) for e in chosen)))

    def max_weight_feasible(self, w, s) -> FeasibleSet:
        fs = self._check_domain(s)
        wf = weight_getter(w)
        if len(fs) <= EXACT_CAP:
            warr, order = self._as_arrays(w)
            mask = np.zeros(len(warr), dtype=np.uint8)
            for e in fs:
                mask[e] = 1
            val, chosen = kernels.matching_opt(
                order, warr, mask, self._eu, self._ev, self.n_vertices
            )
            return FeasibleSet(frozenset(int(e) for e in chosen), float(val))
        if self.bipartite:
            return self._assignment(wf, fs)
        raise SizeLimitError(
            f"exact general matching capped at {EXACT_CAP} candidate edges"
        )

    def prepare_additive(self, w):
        warr, order = self._as_arrays(w)
        eu, ev, nv = self._eu, self._ev, self.n_vertices
        wf = weight_getter(w)

        def solve(mask):
            count = int(np.count_nonzero(mask))
            if count <= EXACT_CAP:
                return kernels.matching_opt(order, warr, mask, eu, ev, nv)
            if self.bipartite:
                fs = self._assignment(
                    wf, frozenset(int(e) for e in np.flatnonzero(mask))
                )
                return fs.weight, sorted(fs.elements)
            raise SizeLimitError(
                f"exact general matching capped at {EXACT_CAP} candidate edges"
            )

        return solve


class Rank1System(SetSystem):
    kind = "rank1"

    def __init__(self, n: int):
        super().__init__()
        if n < 1:
            raise PreconditionError("rank-1 system needs n >= 1")
        self.n = int(n)
        self.ground = tuple(range(self.n))

    def is_feasible(self, s) -> bool:
        return len(self._check_domain(s)) <= 1

    def _compute_rank(self) -> int:
        return 1

    def max_weight_feasible(self, w, s) -> FeasibleSet:
        fs = self._check_domain(s)
        if not fs:
            return FeasibleSet(frozenset(), 0.0)
        wf = weight_getter(w)
        e = min(fs, key=lambda x: (-wf(x), x))
        return FeasibleSet(frozenset({e}), float(wf(e)))


class BlocksSystem(SetSystem):
    """m disjoint blocks of k elements; feasible iff inside a single block."""

    kind = "blocks"

    def __init__(self, m: int, k: int):
        super().__init__()
        if m < 1 or k < 1:
            raise PreconditionError("blocks system needs m >= 1, k >= 1")
        self.m = int(m)
        self.k = int(k)
        self.ground = tuple(range(self.m * self.k))

    def block_of(self, e: int) -> int:
        return e // self.k

    def is_feasible(self, s) -> bool:
        fs = self._check_domain(s)
        return len({self.block_of(e) for e in fs}) <= 1

    def _compute_rank(self) -> int:
        return self.k

    def max_weight_feasible(self, w, s) -> FeasibleSet:
        fs = self._check_domain(s)
        wf = weight_getter(w)
        best = FeasibleSet(frozenset(), 0.0)
        by_block: dict = {}
        for e in fs:
            by_block.setdefault(self.block_of(e), set()).add(e)
        for b in sorted(by_block):
            members = frozenset(by_block[b])
            val = float(sum(wf(e) for e in members))
            if val > best.weight:
                best = FeasibleSet(members, val)
        return best


def bipartite_matching_as_intersection(n_vertices, edges, color):
    """Encode a bipartite graph's matchings as two partition matroids.

    ``color`` maps each vertex to side 0/1; each side contributes one
    partition matroid whose blocks group edges by their endpoint on that
    side (capacity one per vertex).
    """
    matroids = []
    for side in (0, 1):
        groups: dict = {}
        for e, (u, v) in enumerate(edges):
            anchor = u if color[u] == side else v
            groups.setdefault(anchor, []).append(e)
        blocks = [sorted(g) for _, g in sorted(groups.items())]
        matroids.append(Matroid.partition(blocks, [1] * len(blocks)))
    return IntersectionSystem(matroids)


def system_kind_check(system: SetSystem, *kinds: str) -> None:
    if system.kind not in kinds:
        raise KindError(
            f"operation requires system kind in {kinds}, got {system.kind!r}"
        )

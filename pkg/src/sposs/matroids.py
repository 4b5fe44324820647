"""Matroid families with lazy contraction/deletion/restriction views.

A :class:`Matroid` pairs an immutable independence-oracle *family* with a
pair of accumulated element sets (contracted, deleted).  Views never
materialize anything: ``is_independent(S)`` on a view with contracted set
C answers ``family.independent(S | C)``, which realises the contraction
rank identity Rank_view(T) = Rank_base(T ∪ C) − |C|.

Element ids are nonnegative integers, unique within an instance and
stable across views.
"""

from __future__ import annotations

from typing import Iterable

from .errors import DomainError, InvariantError, PreconditionError

EXPLICIT_CAP = 20


def weight_getter(w):
    """Normalize a weight vector (sequence or mapping) to a callable."""
    if callable(w) and not hasattr(w, "__getitem__"):
        return w
    return lambda e: float(w[e])


class UniformFamily:
    kind = "uniform"

    def __init__(self, n: int, r: int):
        if n < 0 or r < 0:
            raise PreconditionError("uniform matroid needs n >= 0, r >= 0")
        self.n = n
        self.r = r
        self.ground = tuple(range(n))

    def independent(self, s: frozenset) -> bool:
        return len(s) <= self.r


class PartitionFamily:
    kind = "partition"

    def __init__(self, blocks: Iterable[Iterable[int]], caps: Iterable[int]):
        self.blocks = tuple(tuple(sorted(b)) for b in blocks)
        self.caps = tuple(int(c) for c in caps)
        if len(self.blocks) != len(self.caps):
            raise PreconditionError("one capacity per block required")
        if any(c < 0 for c in self.caps):
            raise PreconditionError("capacities must be nonnegative")
        self._block_of = {}
        for b, members in enumerate(self.blocks):
            for e in members:
                if e in self._block_of:
                    raise PreconditionError(f"element {e} appears in two blocks")
                self._block_of[e] = b
        self.ground = tuple(sorted(self._block_of))

    def independent(self, s: frozenset) -> bool:
        counts = [0] * len(self.blocks)
        for e in s:
            b = self._block_of[e]
            counts[b] += 1
            if counts[b] > self.caps[b]:
                return False
        return True


class GraphicFamily:
    """Edges of an undirected multigraph; a set is independent iff acyclic.

    Self-loops are permitted and are dependent on their own (a loop is a
    cycle of length one).
    """

    kind = "graphic"

    def __init__(self, n_vertices: int, edges: Iterable[tuple[int, int]]):
        self.n_vertices = int(n_vertices)
        self.edges = tuple((int(u), int(v)) for u, v in edges)
        for u, v in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise PreconditionError("edge endpoint outside vertex range")
        self.ground = tuple(range(len(self.edges)))

    def independent(self, s: frozenset) -> bool:
        parent = list(range(self.n_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in s:
            u, v = self.edges[e]
            if u == v:
                return False
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True


class ExplicitFamily:
    """All independent sets listed explicitly; brute-force oracle for tests."""

    kind = "explicit"

    def __init__(self, ground: Iterable[int], independent: Iterable[Iterable[int]]):
        self.ground = tuple(sorted(set(int(e) for e in ground)))
        if len(self.ground) > EXPLICIT_CAP:
            raise PreconditionError(
                f"explicit family capped at {EXPLICIT_CAP} elements"
            )
        self.sets = frozenset(frozenset(s) for s in independent)
        if frozenset() not in self.sets:
            raise PreconditionError("explicit family must contain the empty set")
        gs = set(self.ground)
        for s in self.sets:
            if not s <= gs:
                raise PreconditionError("independent set outside ground")
            for e in s:
                if s - {e} not in self.sets:
                    raise PreconditionError("explicit family is not downward-closed")

    def independent(self, s: frozenset) -> bool:
        return frozenset(s) in self.sets


class Matroid:
    """An independence oracle plus an immutable stack of minor operations."""

    def __init__(self, family, contracted=frozenset(), deleted=frozenset()):
        self.family = family
        self.contracted = frozenset(contracted)
        self.deleted = frozenset(deleted)
        self.ground = tuple(
            e
            for e in family.ground
            if e not in self.contracted and e not in self.deleted
        )
        self._ground_set = frozenset(self.ground)

    # -- constructors ----------------------------------------------------
    @classmethod
    def uniform(cls, n: int, r: int) -> "Matroid":
        return cls(UniformFamily(n, r))

    @classmethod
    def partition(cls, blocks, caps) -> "Matroid":
        return cls(PartitionFamily(blocks, caps))

    @classmethod
    def graphic(cls, n_vertices, edges) -> "Matroid":
        return cls(GraphicFamily(n_vertices, edges))

    @classmethod
    def explicit(cls, ground, independent) -> "Matroid":
        return cls(ExplicitFamily(ground, independent))

    # -- helpers ---------------------------------------------------------
    @property
    def is_base_view(self) -> bool:
        return not self.contracted and not self.deleted

    def _check_domain(self, s) -> frozenset:
        fs = frozenset(s)
        if not fs <= self._ground_set:
            bad = sorted(fs - self._ground_set)
            raise DomainError(f"elements {bad} outside the view's ground set")
        return fs

    # -- queries ----------------------------------------------------------
    def is_independent(self, s) -> bool:
        fs = self._check_domain(s)
        return self.family.independent(fs | self.contracted)

    def rank(self, s=None) -> int:
        """Size of a maximum independent subset of S (greedy insertion)."""
        fs = self._ground_set if s is None else self._check_domain(s)
        base = set(self.contracted)
        count = 0
        for e in sorted(fs):
            if self.family.independent(frozenset(base | {e})):
                base.add(e)
                count += 1
        return count

    def span(self, s) -> frozenset:
        fs = self._check_domain(s)
        r = self.rank(fs)
        return frozenset(
            e for e in self.ground if e in fs or self.rank(fs | {e}) == r
        )

    # -- views -------------------------------------------------------------
    def contract(self, s) -> "Matroid":
        fs = self._check_domain(s)
        if not self.is_independent(fs):
            raise PreconditionError("can only contract an independent set")
        return Matroid(self.family, self.contracted | fs, self.deleted)

    def delete(self, s) -> "Matroid":
        fs = self._check_domain(s)
        return Matroid(self.family, self.contracted, self.deleted | fs)

    def restrict(self, s) -> "Matroid":
        fs = self._check_domain(s)
        return Matroid(
            self.family, self.contracted, self.deleted | (self._ground_set - fs)
        )

    # -- optimization ------------------------------------------------------
    def max_weight_independent(self, w) -> frozenset:
        """Greedy max-weight independent set.

        Elements are scanned in nonincreasing weight order, ties broken by
        ascending id; greedy inserts every element that keeps the set
        independent (so all-zero weights yield a maximal independent set).
        """
        wf = weight_getter(w)
        order = sorted(self.ground, key=lambda e: (-wf(e), e))
        base = set(self.contracted)
        chosen = set()
        for e in order:
            if self.family.independent(frozenset(base | {e})):
                base.add(e)
                chosen.add(e)
        return frozenset(chosen)

    def find_circuit(self, s, e: int) -> frozenset:
        """The unique circuit inside S ∪ {e} for independent S spanning e."""
        fs = self._check_domain(s)
        self._check_domain({e})
        if e in fs:
            raise PreconditionError("e must lie outside S")
        if not self.is_independent(fs):
            raise PreconditionError("S must be independent")
        if self.is_independent(fs | {e}):
            raise PreconditionError(f"no circuit: {e} is not spanned by S")
        return frozenset({e}) | frozenset(
            f for f in fs if self.is_independent((fs - {f}) | {e})
        )

    def find_exchange_pair(self, s1, s2, e: int) -> int:
        """First f ∈ S2∖S1 (ascending id, within the circuit of e in S2)
        with S1∖{e}∪{f} and S2∖{f}∪{e} both independent."""
        f1, f2 = self._check_domain(s1), self._check_domain(s2)
        if not self.is_independent(f1) or not self.is_independent(f2):
            raise PreconditionError("S1 and S2 must both be independent")
        if e not in f1 or e in f2:
            raise PreconditionError("e must lie in S1∖S2")
        if self.is_independent(f2 | {e}):
            raise PreconditionError("e must be spanned by S2")
        circuit = self.find_circuit(f2, e)
        for f in sorted(circuit):
            if f == e or f in f1:
                continue
            if self.is_independent((f1 - {e}) | {f}) and self.is_independent(
                (f2 - {f}) | {e}
            ):
                return f
        raise InvariantError(
            "no valid exchange pair found; the exchange lemma guarantees one"
        )

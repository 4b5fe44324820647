"""Additive and coverage objectives, including the equal r-partition family.

Coverage objectives store one bitmask of universe points per element, so
evaluation is a popcount over an OR-reduction.  The equal r-partition
construction discretizes the unit interval into r^(n/r) equal atoms (the
coarsest common refinement of all n/r partitions); element (i, j) covers
exactly the atoms whose i-th base-r digit equals j-1.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import PreconditionError, SizeLimitError
from .rng import substream

ATOM_CAP = 2**24


class Objective:
    kind = "abstract"
    n = 0

    def evaluate(self, s) -> float:
        raise NotImplementedError


class Additive(Objective):
    kind = "additive"

    def __init__(self, w):
        self.w = np.asarray(w, dtype=float)
        if (self.w < 0).any():
            raise PreconditionError("additive weights must be nonnegative")
        self.n = len(self.w)

    def evaluate(self, s) -> float:
        return float(sum(self.w[e] for e in s))


class Coverage(Objective):
    """f(S) = measure of the union of per-element point sets A_e.

    ``normalized`` selects the uniform measure 1/|U| per point; otherwise
    the raw covered-point count is returned.
    """

    kind = "coverage"

    def __init__(self, universe: int, sets, normalized: bool = False):
        self.universe = int(universe)
        self.sets = tuple(frozenset(int(p) for p in a) for a in sets)
        for a in self.sets:
            if any(p < 0 or p >= self.universe for p in a):
                raise PreconditionError("coverage point outside universe")
        self.normalized = bool(normalized)
        self.n = len(self.sets)
        self._masks = tuple(
            sum(1 << p for p in a) for a in self.sets
        )

    def evaluate(self, s) -> float:
        acc = 0
        for e in s:
            acc |= self._masks[e]
        count = acc.bit_count()
        return count / self.universe if self.normalized else float(count)


class EqualPartitionCoverage(Coverage):
    """The n/r pairwise uniformly-overlapping equal r-partitions of [0,1]."""

    kind = "equal_partition"

    def __init__(self, n: int, r: int):
        if r < 2 or n % r != 0:
            raise PreconditionError("need r >= 2 and r dividing n")
        t = n // r
        atoms = r**t
        if atoms > ATOM_CAP:
            raise SizeLimitError(f"atom count {atoms} exceeds cap {ATOM_CAP}")
        self.num_partitions = t
        self.r = r
        sets = []
        for i in range(1, t + 1):
            shift = r ** (t - i)
            for j in range(r):
                sets.append(
                    [a for a in range(atoms) if (a // shift) % r == j]
                )
        super().__init__(atoms, sets, normalized=True)

    def element_id(self, i: int, j: int) -> int:
        """Element id of the j-th set (1-based) of the i-th partition (1-based)."""
        if not (1 <= i <= self.num_partitions and 1 <= j <= self.r):
            raise PreconditionError("partition/set index out of range")
        return (i - 1) * self.r + (j - 1)

    def incidence_vector(self, q) -> tuple:
        s = [0] * self.num_partitions
        for e in q:
            s[e // self.r] += 1
        return tuple(s)


def equal_partition_instance(n: int, r: int) -> EqualPartitionCoverage:
    """Coverage objective over r^(n/r) equal atoms with element indexing."""
    return EqualPartitionCoverage(n, r)


def incidence_value(s, r: int) -> float:
    """Closed-form coverage of an incidence vector: 1 - prod(1 - s_i/r)."""
    prod = 1.0
    for si in s:
        if not 0 <= si <= r:
            raise PreconditionError("incidence entries must lie in [0, r]")
        prod *= 1.0 - si / r
    return 1.0 - prod


def estimate_multilinear(obj: Objective, x, trials: int, seed: int):
    """Monte Carlo estimate of the multilinear extension F(x).

    Returns (mean, stderr) over independent inclusion draws.
    """
    x = np.asarray(x, dtype=float)
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    if x.min() < 0 or x.max() > 1:
        raise PreconditionError("x must lie in [0,1]^E")
    rng = substream(seed, "multilinear")
    vals = np.empty(trials)
    for t in range(trials):
        draw = rng.random(len(x)) < x
        vals[t] = obj.evaluate(np.flatnonzero(draw))
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr

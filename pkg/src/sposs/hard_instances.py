"""Generators for the lower-bound instance families.

Each generator returns (instance, metadata).  The block family records
the prescribed block count k^k * ln k for the chosen k but never
materializes it; callers pick a scaled-down m.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import PreconditionError
from .matroids import Matroid
from .objectives import Additive, equal_partition_instance
from .stochastic import SppInstance
from .systems import BlocksSystem, MatroidSystem, Rank1System


def rank1_hard_instance(n: int, mode: str = "example31",
                        seed: int = 0) -> tuple[SppInstance, dict]:
    """Unweighted rank-1 instance with the vanishing activation probability.

    mode 'example31' uses p = 1/n; mode 'prop45' uses p = 1/sqrt(n).
    """
    if n < 1:
        raise PreconditionError("n must be >= 1")
    if mode == "example31":
        p = 1.0 / n
    elif mode == "prop45":
        p = 1.0 / math.sqrt(n)
    else:
        raise PreconditionError("mode must be 'example31' or 'prop45'")
    inst = SppInstance(
        Rank1System(n), Additive(np.ones(n)), p, seed, name=f"rank1-{mode}-{n}"
    )
    meta = {"mode": mode, "n": n, "p": p,
            "exact_opt": 1.0 - (1.0 - p) ** n}
    return inst, meta


def rank1_fixed_q_ratio(n: int, p: float, q_size: int) -> float:
    """Closed-form ratio of a fixed |Q|-element query set on unweighted rank-1."""
    return (1.0 - (1.0 - p) ** q_size) / (1.0 - (1.0 - p) ** n)


def block_hard_instance(m: int, k: int, seed: int = 0) -> tuple[SppInstance, dict]:
    """m blocks of k unweighted elements, feasible within one block, p = 1/k."""
    if m < 1 or k < 1:
        raise PreconditionError("m and k must be >= 1")
    inst = SppInstance(
        BlocksSystem(m, k),
        Additive(np.ones(m * k)),
        1.0 / k,
        seed,
        name=f"blocks-{m}x{k}",
    )
    meta = {
        "m": m,
        "k": k,
        "p": 1.0 / k,
        "prescribed_m": math.ceil(k**k * math.log(k)) if k >= 2 else 1,
        "rank": k,
    }
    return inst, meta


def blocks_best_fixed_q_ratio(m: int, k: int, budget: int) -> tuple[float, tuple]:
    """Exact best ratio over all query sets of `budget` elements.

    By block symmetry a query set is characterized by how many elements it
    places in each block; the value of a composition (c_1, ...) is
    E[max_i Binomial(c_i, p)], computed exactly from the CDF product.
    Returns (best ratio, best composition as a sorted tuple).
    """
    p = 1.0 / k

    def binom_cdf(c):  # P[Bin(c, p) <= v] for v = 0..k
        pmf = np.zeros(k + 1)
        for v in range(c + 1):
            pmf[v] = math.comb(c, v) * p**v * (1 - p) ** (c - v)
        return np.cumsum(pmf)

    cdfs = [binom_cdf(c) for c in range(k + 1)]

    def expected_max(counts):
        # E[max] = sum_{v>=1} P[max >= v]
        cdf = np.ones(k + 1)
        for c in counts:
            cdf = cdf * cdfs[c]
        return float(sum(1.0 - cdf[v - 1] for v in range(1, k + 1)))

    denom = expected_max([k] * m)
    best_val, best_comp = -1.0, ()

    def partitions(total, max_part, max_parts, prefix):
        nonlocal best_val, best_comp
        if total == 0:
            val = expected_max(list(prefix))
            if val > best_val:
                best_val, best_comp = val, tuple(prefix)
            return
        if max_parts == 0:
            return
        for part in range(min(max_part, total), 0, -1):
            partitions(total - part, part, max_parts - 1, prefix + [part])

    partitions(budget, k, m, [])
    return best_val / denom, best_comp


def equal_partition_hard_instance(n: int, r: int, p: float,
                                  seed: int = 0) -> tuple[SppInstance, dict]:
    """Uniform(n, r) matroid with the equal r-partition coverage objective."""
    if p > 1.0 / 3.0:
        raise PreconditionError("this family is stated for p <= 1/3")
    obj = equal_partition_instance(n, r)
    inst = SppInstance(
        MatroidSystem(Matroid.uniform(n, r)),
        obj,
        p,
        seed,
        name=f"equal-partition-{n}-{r}",
    )
    meta = {"n": n, "r": r, "p": p, "atoms": obj.universe}
    return inst, meta

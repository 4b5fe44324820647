"""SPP instances, active-set sampling, marginals, and the ratio evaluator.

The central measurement is evaluate_sparsifier: per trial it draws a
fresh query set Q (for randomized producers) and an independent active
set R, solves the stochastic optimum on Q∩R and on R, and reports the
ratio of means sum(opt(Q∩R)) / sum(opt(R)) with a delta-method standard
error, plus the sparsification degree mean|Q| / rank.

All randomness flows through rng.substream(seed, trial, role), so runs
are bit-reproducible and trials can be computed in any order (including
across threads) with an order-independent reduction.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import KindError, PreconditionError, SizeLimitError
from .objectives import Additive, Coverage, Objective
from .rng import substream
from .systems import FeasibleSet, MatroidSystem, SetSystem

ENUM_CAP = 12


@dataclass(frozen=True)
class SppInstance:
    system: SetSystem
    objective: Objective
    p: float
    seed: int
    name: str = ""

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            # p=0 is permitted only via the sampling helpers in tests; the
            # instance contract is 0 < p <= 1.
            raise PreconditionError("activation probability must be in (0, 1]")
        if self.objective.n != len(self.system.ground):
            raise PreconditionError("objective ground must match system ground")


@dataclass(frozen=True)
class Marginals:
    q: np.ndarray
    sample_count: int
    estimator: str  # "exact" | "empirical"


@dataclass(frozen=True)
class EvalReport:
    ratio_mean: float
    ratio_stderr: float
    degree_mean: float
    opt_mean: float
    trials: int
    wall_time: float


def sample_active(inst: SppInstance, rng) -> frozenset:
    """Independent Bernoulli(p) inclusion of every ground element."""
    ground = inst.system.ground
    draws = rng.random(len(ground))
    return frozenset(e for e, u in zip(ground, draws) if u < inst.p)


def _coverage_opt(inst: SppInstance, fs: frozenset) -> FeasibleSet:
    """Exact stochastic optimum for coverage objectives (brute force).

    Coverage is monotone, so it suffices to scan maximum-size independent
    subsets of the candidates; supported constraint kinds are uniform /
    partition matroids and rank-1.
    """
    obj = inst.objective
    sys = inst.system
    if len(fs) > 22:
        raise SizeLimitError("coverage brute force capped at 22 candidates")
    if sys.kind == "rank1":
        best, best_val = frozenset(), 0.0
        for e in sorted(fs):
            v = obj.evaluate([e])
            if v > best_val:
                best, best_val = frozenset({e}), v
        return FeasibleSet(best, best_val)
    if sys.kind != "matroid" or not sys.matroid.is_base_view:
        raise KindError("coverage optimum supports uniform/partition/rank-1")
    fam = sys.matroid.family
    if fam.kind == "uniform":
        size = min(fam.r, len(fs))
        candidates = itertools.combinations(sorted(fs), size)
    elif fam.kind == "partition":
        per_block: dict = {}
        for e in fs:
            per_block.setdefault(fam._block_of[e], []).append(e)
        choices = []
        for b, members in sorted(per_block.items()):
            take = min(fam.caps[b], len(members))
            choices.append(list(itertools.combinations(sorted(members), take)))
        candidates = (
            tuple(itertools.chain.from_iterable(combo))
            for combo in itertools.product(*choices)
        )
    else:
        raise KindError("coverage optimum supports uniform/partition/rank-1")
    best, best_val = frozenset(), 0.0
    for cand in candidates:
        v = obj.evaluate(cand)
        if v > best_val:
            best, best_val = frozenset(cand), v
    return FeasibleSet(best, best_val)


def stochastic_opt(inst: SppInstance, r) -> FeasibleSet:
    """max f(T) over feasible T ⊆ R, solved exactly."""
    fs = inst.system._check_domain(r)
    if isinstance(inst.objective, Additive):
        return inst.system.max_weight_feasible(inst.objective.w, fs)
    if isinstance(inst.objective, Coverage):
        return _coverage_opt(inst, fs)
    raise KindError(f"unsupported objective kind {inst.objective.kind!r}")


def _subset_probability(inst, mask_bits, n):
    k = mask_bits.bit_count()
    return inst.p**k * (1.0 - inst.p) ** (n - k)


def enumerate_active_sets(inst: SppInstance):
    """Yield (R, probability) over all 2^|E| active sets (|E| <= ENUM_CAP)."""
    ground = inst.system.ground
    n = len(ground)
    if n > ENUM_CAP:
        raise SizeLimitError(f"exact enumeration capped at {ENUM_CAP} elements")
    for bits in range(1 << n):
        r = frozenset(ground[i] for i in range(n) if bits >> i & 1)
        yield r, _subset_probability(inst, bits, n)


def exact_marginals(inst: SppInstance) -> Marginals:
    """q_e = Pr[e in stochastic optimum], by full enumeration of R."""
    n = len(inst.system.ground)
    index = {e: i for i, e in enumerate(inst.system.ground)}
    q = np.zeros(n)
    for r, prob in enumerate_active_sets(inst):
        opt = stochastic_opt(inst, r)
        for e in opt.elements:
            q[index[e]] += prob
    full = np.zeros(max(inst.system.ground, default=-1) + 1)
    for e, i in index.items():
        full[e] = q[i]
    return Marginals(full, 0, "exact")


def exact_expected_opt(inst: SppInstance, q_set=None) -> float:
    """E[opt(Q ∩ R)] by enumeration (Q = ground when omitted)."""
    total = 0.0
    for r, prob in enumerate_active_sets(inst):
        rr = r if q_set is None else r & frozenset(q_set)
        total += prob * stochastic_opt(inst, rr).weight
    return total


def estimate_marginals(inst: SppInstance, n_samples: int, seed: int,
                       clamp: float | None = None) -> Marginals:
    """Empirical q̂ from n_samples stochastic-optimum draws.

    With ``clamp=delta`` the one-sided underestimate shift is applied:
    q̂_e <- max(0, q̂_e - delta/n), guaranteeing q̂ never overshoots the
    true marginal by more than sampling luck allows in one direction.
    """
    if n_samples < 1:
        raise PreconditionError("n_samples must be >= 1")
    n = max(inst.system.ground, default=-1) + 1
    counts = np.zeros(n)
    for i in range(n_samples):
        rng = substream(seed, "marginals", i)
        r = sample_active(inst, rng)
        for e in stochastic_opt(inst, r).elements:
            counts[e] += 1
    q = counts / n_samples
    if clamp is not None:
        q = np.maximum(0.0, q - clamp / len(inst.system.ground))
    return Marginals(q, n_samples, "empirical")


def _mask_of(elements, n):
    mask = np.zeros(n, dtype=np.uint8)
    for e in elements:
        mask[e] = 1
    return mask


def _trial_worker(inst, producer, seed, prepared, cached_q, t):
    if cached_q is not None:
        q = cached_q
    else:
        q = producer.sample(substream(seed, t, "query"))
    r = sample_active(inst, substream(seed, t, "active"))
    qr = q & r
    if prepared is not None:
        n = max(inst.system.ground, default=-1) + 1
        a = prepared(_mask_of(qr, n))[0]
        b = prepared(_mask_of(r, n))[0]
    else:
        a = stochastic_opt(inst, qr).weight
        b = stochastic_opt(inst, r).weight
    return a, b, len(q)


def evaluate_sparsifier(inst: SppInstance, producer, trials: int, seed: int,
                        threads: int | None = None) -> EvalReport:
    """Monte Carlo ratio/degree measurement of a sparsifier producer."""
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    start = time.perf_counter()
    rank = inst.system.rank()
    cached_q = None
    if not producer.randomized:
        cached_q = producer.sample(substream(seed, "deterministic"))
    prepared = None
    if isinstance(inst.objective, Additive):
        prepared = inst.system.prepare_additive(inst.objective.w)

    if threads is None:
        threads = int(os.environ.get("SPOSS_THREADS", "1"))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(
                pool.map(
                    lambda t: _trial_worker(
                        inst, producer, seed, prepared, cached_q, t
                    ),
                    range(trials),
                )
            )
    else:
        rows = [
            _trial_worker(inst, producer, seed, prepared, cached_q, t)
            for t in range(trials)
        ]

    a = np.array([row[0] for row in rows])
    b = np.array([row[1] for row in rows])
    sizes = np.array([row[2] for row in rows], dtype=float)
    sum_a = math.fsum(a)
    sum_b = math.fsum(b)
    if sum_b > 0:
        ratio = sum_a / sum_b
        stderr = _ratio_stderr(a, b)
    else:
        ratio, stderr = float("nan"), float("nan")
    report = EvalReport(
        ratio_mean=ratio,
        ratio_stderr=stderr,
        degree_mean=float(math.fsum(sizes) / trials / rank) if rank else 0.0,
        opt_mean=float(sum_b / trials),
        trials=trials,
        wall_time=time.perf_counter() - start,
    )
    return report


def _ratio_stderr(a: np.ndarray, b: np.ndarray) -> float:
    """Delta-method standard error for mean(a)/mean(b) on paired samples."""
    n = len(a)
    if n < 2:
        return float("nan")
    ma, mb = a.mean(), b.mean()
    if mb == 0:
        return float("nan")
    va = a.var(ddof=1)
    vb = b.var(ddof=1)
    cov = np.cov(a, b, ddof=1)[0, 1]
    var_ratio = (
        va / mb**2 + ma**2 * vb / mb**4 - 2 * ma * cov / mb**3
    ) / n
    return float(math.sqrt(max(var_ratio, 0.0)))

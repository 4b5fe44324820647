"""Contention resolution schemes and empirical balance measurement.

A scheme maps a marginal vector x and an active set A to a feasible
subset of A.  Shipped schemes are feasibility-correct but make no balance
promise; their balance is *measured* (empirical_balance) and fed into the
parametric ratio formulas downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvariantError, PreconditionError
from .matroids import weight_getter
from .rng import substream
from .systems import SetSystem

__all__ = [
    "OrderedGreedy",
    "Rank1Uniform",
    "BalanceReport",
    "empirical_balance",
    "monotonicity_probe",
]


class CrsScheme:
    def __init__(self, system: SetSystem):
        self.system = system

    def _priorities(self, rng) -> np.ndarray:
        n = max(self.system.ground, default=-1) + 1
        return rng.random(n)

    def _resolve_with(self, pri, a) -> frozenset:
        raise NotImplementedError

    def resolve(self, x, a, rng) -> frozenset:
        """Feasible subset of the active set A."""
        fs = self.system._check_domain(a)
        out = self._resolve_with(self._priorities(rng), fs)
        if not out <= fs or not self.system.is_feasible(out):
            raise InvariantError("scheme produced an infeasible or escaping set")
        return out


class OrderedGreedy(CrsScheme):
    """Scan A in a fixed or random order, keep what stays feasible.

    order="random" draws a fresh uniform order per call; order="weight"
    scans by descending weight, ties ascending id.
    """

    def __init__(self, system: SetSystem, order: str = "random", w=None):
        super().__init__(system)
        if order not in ("random", "weight"):
            raise PreconditionError("order must be 'random' or 'weight'")
        if order == "weight" and w is None:
            raise PreconditionError("weight order requires a weight vector")
        self.order = order
        self._w = weight_getter(w) if w is not None else None

    def _resolve_with(self, pri, fs) -> frozenset:
        if self.order == "weight":
            scan = sorted(fs, key=lambda e: (-self._w(e), e))
        else:
            scan = sorted(fs, key=lambda e: (pri[e], e))
        accepted: set = set()
        for e in scan:
            if self.system.is_feasible(frozenset(accepted | {e})):
                accepted.add(e)
        return frozenset(accepted)


class Rank1Uniform(CrsScheme):
    """Return one uniformly random active element (rank-1 systems)."""

    def _resolve_with(self, pri, fs) -> frozenset:
        if not fs:
            return frozenset()
        return frozenset({min(fs, key=lambda e: (pri[e], e))})


@dataclass(frozen=True)
class BalanceReport:
    balance: np.ndarray       # NaN where undefined (element never active)
    stderr: np.ndarray
    min_balance: float
    active_counts: np.ndarray
    undefined: tuple


def empirical_balance(crs: CrsScheme, x, trials: int, seed: int) -> BalanceReport:
    """Monte Carlo Pr[e in resolve(R(x)) | e in R(x)] per element."""
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    ground = crs.system.ground
    n = max(ground, default=-1) + 1
    x = np.asarray(x, dtype=float)
    active_counts = np.zeros(n)
    kept_counts = np.zeros(n)
    for t in range(trials):
        rng = substream(seed, "balance", t)
        draws = rng.random(n)
        a = frozenset(e for e in ground if draws[e] < x[e])
        kept = crs.resolve(x, a, substream(seed, "balance-order", t))
        for e in a:
            active_counts[e] += 1
        for e in kept:
            kept_counts[e] += 1
    with np.errstate(invalid="ignore", divide="ignore"):
        balance = kept_counts / active_counts
        stderr = np.sqrt(
            np.maximum(balance * (1 - balance), 0.0) / np.maximum(active_counts, 1)
        )
    undefined = tuple(
        e for e in ground if active_counts[e] == 0 and x[e] > 0
    )
    considered = [
        balance[e]
        for e in ground
        if active_counts[e] > 0 and x[e] > 0
    ]
    min_balance = float(min(considered)) if considered else float("nan")
    return BalanceReport(balance, stderr, min_balance, active_counts, undefined)


def monotonicity_probe(crs: CrsScheme, x, e: int, a1, a2, trials: int,
                       seed: int, tolerance: float = 0.0) -> dict:
    """Estimate Pr[e in resolve(A1)] >= Pr[e in resolve(A2)] for A1 ⊆ A2.

    Both probabilities share the per-trial priority draw (coupling), so
    A1 == A2 gives exactly equal estimates.
    """
    f1 = crs.system._check_domain(a1)
    f2 = crs.system._check_domain(a2)
    if e not in f1 or not f1 <= f2:
        raise PreconditionError("need e in A1 and A1 ⊆ A2")
    hits1 = hits2 = 0
    for t in range(trials):
        pri = crs._priorities(substream(seed, "probe", t))
        if e in crs._resolve_with(pri, f1):
            hits1 += 1
        if e in crs._resolve_with(pri, f2):
            hits2 += 1
    p1, p2 = hits1 / trials, hits2 / trials
    stderr = math.sqrt((p1 * (1 - p1) + p2 * (1 - p2)) / trials)
    return {
        "p_small": p1,
        "p_large": p2,
        "holds": p1 >= p2 - tolerance,
        "stderr": stderr,
        "trials": trials,
    }

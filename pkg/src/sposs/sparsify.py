"""The five sparsification algorithms plus trivial reference producers.

Every producer exposes sample(rng) -> frozenset for the evaluation loop
(deterministic producers ignore rng and return a cached set) and a
function-style entry point returning a SparseSet with provenance.
All count formulas take real logarithms and are then rounded up.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import KindError, PreconditionError
from .stochastic import Marginals, SppInstance, sample_active, stochastic_opt

__all__ = [
    "SparseSet",
    "nss_tau",
    "intersection_tau",
    "hybrid_t",
    "FixedSparsifier",
    "IdentitySparsifier",
    "EmptySparsifier",
    "CrsSparsifier",
    "MatroidNssSparsifier",
    "IntersectionSampleSparsifier",
    "MatchingHybridSparsifier",
    "CoverageLpSparsifier",
    "crs_sparsify",
    "matroid_nss_sparsify",
    "intersection_sample_sparsify",
    "matching_hybrid_sparsify",
    "coverage_lp_sparsify",
    "measure_degree",
]


@dataclass(frozen=True)
class SparseSet:
    Q: frozenset
    producer: str
    params: dict
    randomized: bool
    extra: dict = field(default_factory=dict)


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise PreconditionError("epsilon must lie in (0, 1)")


def nss_tau(p: float, eps: float) -> int:
    _check_eps(eps)
    return max(1, math.ceil(math.log(1.0 / eps) / p))


def intersection_tau(p: float, eps: float) -> int:
    _check_eps(eps)
    return max(1, math.ceil(2.0 / (eps * p) * math.log(2.0 / eps)))


def hybrid_t(p: float, eps: float) -> int:
    # The source formula is read as 2000 * ln(1/eps)^2 / (eps^4 * p); this
    # reading is recorded in every producer's params.
    _check_eps(eps)
    return math.ceil(2000.0 * math.log(1.0 / eps) ** 2 / (eps**4 * p))


class Sparsifier:
    name = "abstract"
    randomized = True

    def __init__(self, inst: SppInstance, params: dict | None = None):
        self.inst = inst
        self.params = dict(params or {})

    def sample(self, rng) -> frozenset:
        raise NotImplementedError

    def sparse_set(self, rng) -> SparseSet:
        return SparseSet(self.sample(rng), self.name, self.params, self.randomized)


class FixedSparsifier(Sparsifier):
    name = "fixed"
    randomized = False

    def __init__(self, inst: SppInstance, q):
        super().__init__(inst, {"size": len(frozenset(q))})
        self._q = inst.system._check_domain(q)

    def sample(self, rng) -> frozenset:
        return self._q


class IdentitySparsifier(FixedSparsifier):
    name = "identity"

    def __init__(self, inst: SppInstance):
        super().__init__(inst, inst.system.ground)
        self.params = {}


class EmptySparsifier(FixedSparsifier):
    name = "empty"

    def __init__(self, inst: SppInstance):
        super().__init__(inst, frozenset())
        self.params = {}


class CrsSparsifier(Sparsifier):
    """Include e with probability q_e/p, independently."""

    name = "crs"

    def __init__(self, inst: SppInstance, marginals: Marginals):
        super().__init__(
            inst, {"estimator": marginals.estimator, "N": marginals.sample_count}
        )
        q = np.asarray(marginals.q, dtype=float)
        over = q > inst.p + 1e-12
        if over.any():
            warnings.warn(
                "marginal estimates exceed p; clamping inclusion probability at 1",
                stacklevel=2,
            )
        self._probs = np.minimum(q / inst.p, 1.0)

    def sample(self, rng) -> frozenset:
        ground = self.inst.system.ground
        draws = rng.random(len(self._probs))
        return frozenset(e for e in ground if draws[e] < self._probs[e])


class MatroidNssSparsifier(Sparsifier):
    """Union of tau successively deleted max-weight bases (deterministic)."""

    name = "matroid_nss"
    randomized = False

    def __init__(self, inst: SppInstance, eps: float):
        if inst.system.kind != "matroid":
            raise KindError("matroid_nss requires a single-matroid system")
        if inst.objective.kind != "additive":
            raise KindError("matroid_nss requires an additive objective")
        tau = nss_tau(inst.p, eps)
        super().__init__(inst, {"eps": eps, "tau": tau})
        w = inst.objective.w
        m = inst.system.matroid
        bases = []
        q: set = set()
        for _ in range(tau):
            if not m.ground:
                break
            basis = m.max_weight_independent(w)
            # Nested-spanning-set structure: each basis spans the matroid it
            # was extracted from.
            assert m.rank(basis) == m.rank()
            bases.append(frozenset(basis))
            q |= basis
            m = m.delete(basis)
        self.bases = tuple(bases)
        self._q = frozenset(q)

    def sample(self, rng) -> frozenset:
        return self._q

    def sparse_set(self, rng) -> SparseSet:
        return SparseSet(
            self._q, self.name, self.params, False, {"bases": self.bases}
        )


class IntersectionSampleSparsifier(Sparsifier):
    """Union of tau independent stochastic-optimum samples."""

    name = "intersection_sample"

    def __init__(self, inst: SppInstance, eps: float, tau: int | None = None):
        if inst.system.kind not in ("intersection", "matroid", "matching"):
            raise KindError(
                "intersection_sample requires an intersection-like system"
            )
        if inst.objective.kind != "additive":
            raise KindError("intersection_sample requires an additive objective")
        tau = intersection_tau(inst.p, eps) if tau is None else int(tau)
        super().__init__(inst, {"eps": eps, "tau": tau})
        self.tau = tau

    def sample_list(self, rng) -> list:
        out = []
        for _ in range(self.tau):
            r = sample_active(self.inst, rng)
            out.append(stochastic_opt(self.inst, r).elements)
        return out

    def sample(self, rng) -> frozenset:
        return frozenset().union(*self.sample_list(rng))

    def sparse_set(self, rng) -> SparseSet:
        q_list = self.sample_list(rng)
        return SparseSet(
            frozenset().union(*q_list),
            self.name,
            self.params,
            True,
            {"q_list": tuple(q_list)},
        )


class MatchingHybridSparsifier(Sparsifier):
    """Q_CRS (marginal sampling) union Q_Greedy (T optimum samples)."""

    name = "matching_hybrid"

    def __init__(self, inst: SppInstance, eps: float, marginals: Marginals,
                 t_override: int | None = None):
        if inst.system.kind != "matching":
            raise KindError("matching_hybrid requires a matching system")
        t_paper = hybrid_t(inst.p, eps)
        t = t_paper if t_override is None else int(t_override)
        super().__init__(
            inst,
            {
                "eps": eps,
                "T": t,
                "T_paper": t_paper,
                "T_overridden": t_override is not None,
                "T_formula": "2000*ln(1/eps)^2/(eps^4*p)",
            },
        )
        self.t = t
        self._crs = CrsSparsifier(inst, marginals)

    def sample_split(self, rng):
        q_crs = self._crs.sample(rng)
        q_greedy: frozenset = frozenset()
        for _ in range(self.t):
            r = sample_active(self.inst, rng)
            q_greedy |= stochastic_opt(self.inst, r).elements
        return q_crs, q_greedy

    def sample(self, rng) -> frozenset:
        q_crs, q_greedy = self.sample_split(rng)
        return q_crs | q_greedy

    def sparse_set(self, rng) -> SparseSet:
        q_crs, q_greedy = self.sample_split(rng)
        return SparseSet(
            q_crs | q_greedy,
            self.name,
            self.params,
            True,
            {"q_crs": q_crs, "q_greedy": q_greedy},
        )


class CoverageLpSparsifier(Sparsifier):
    """Solve the coverage LP over a compact matroid polytope, round x/p."""

    name = "coverage_lp"

    def __init__(self, inst: SppInstance):
        from .lp import build_coverage_lp, solve

        lp, meta = build_coverage_lp(inst)
        sol = solve(lp)
        super().__init__(inst, {"lp_value": sol.value})
        self.lp_value = sol.value
        self.x = sol.x[: meta["n_x"]]
        self.y = sol.x[meta["n_x"]:]

    def sample(self, rng) -> frozenset:
        ground = self.inst.system.ground
        draws = rng.random(len(ground))
        p = self.inst.p
        return frozenset(
            e for i, e in enumerate(ground) if draws[i] < min(self.x[i] / p, 1.0)
        )


def crs_sparsify(inst, marginals, rng) -> SparseSet:
    return CrsSparsifier(inst, marginals).sparse_set(rng)


def matroid_nss_sparsify(inst, eps: float) -> SparseSet:
    return MatroidNssSparsifier(inst, eps).sparse_set(None)


def intersection_sample_sparsify(inst, eps: float, rng) -> SparseSet:
    return IntersectionSampleSparsifier(inst, eps).sparse_set(rng)


def matching_hybrid_sparsify(inst, eps, marginals, rng,
                             t_override=None) -> SparseSet:
    return MatchingHybridSparsifier(inst, eps, marginals, t_override).sparse_set(rng)


def coverage_lp_sparsify(inst, rng) -> SparseSet:
    return CoverageLpSparsifier(inst).sparse_set(rng)


def measure_degree(producer: Sparsifier, inst: SppInstance, trials: int,
                   seed: int):
    """Monte Carlo mean of |Q|/rank with its standard error."""
    from .rng import substream

    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    rank = inst.system.rank()
    sizes = np.array(
        [
            len(producer.sample(substream(seed, "degree", t))) / rank
            for t in range(trials)
        ]
    )
    stderr = float(sizes.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return float(sizes.mean()), stderr

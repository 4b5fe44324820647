"""Constructive certificate procedures from the analysis.

construct_T: exchange-map augmentation of two independent sets against a
random active set (per-matroid); construct_I: stitching a feasible active
subset out of the union of optimum samples in a matroid intersection;
classify_crucial / augment_matching / split_edges: the matching-pipeline
helpers.  Each procedure asserts its output guarantees on every call.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import InvariantError, KindError, PreconditionError
from .matroids import Matroid
from .sparsify import SparseSet
from .stochastic import Marginals, SppInstance
from .systems import MatchingSystem


@dataclass(frozen=True)
class ExchangeTrace:
    """Replayable record of construct_T decisions."""

    steps: tuple  # each: {"e": id, "action": add|drop|swap, "f": id|None, "active": bool}

    def to_json(self) -> str:
        return json.dumps({"steps": list(self.steps)}, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "ExchangeTrace":
        return ExchangeTrace(tuple(json.loads(text)["steps"]))


def replay_trace(s1, s2, trace: ExchangeTrace) -> frozenset:
    """Re-apply a trace to the original (S1, S2); returns the resulting T."""
    s1, s2 = set(s1), set(s2)
    for step in trace.steps:
        e, f = step["e"], step.get("f")
        if step["action"] == "add":
            s2.add(e)
        elif step["action"] == "drop":
            s1.discard(e)
        elif step["active"]:
            s2.discard(f)
            s2.add(e)
        else:
            s1.discard(e)
            s1.add(f)
    return frozenset(s2)


def construct_T(m: Matroid, s1, s2, r) -> tuple[frozenset, ExchangeTrace]:
    """Exchange-map augmentation of S1's active elements into S2.

    Processes S1∖S2 in ascending id.  An element outside span(S2) joins S2
    if active, else leaves S1.  An element inside span(S2) swaps with an
    exchange partner f: active e replaces f in S2, inactive e cedes its
    S1 slot to f.  Output T = final S2.
    """
    s1 = m._check_domain(s1)
    s2 = m._check_domain(s2)
    r = frozenset(r)
    if not m.is_independent(s1) or not m.is_independent(s2):
        raise PreconditionError("S1 and S2 must be independent")
    orig_s1, orig_s2 = s1, s2
    steps = []
    for e in sorted(orig_s1 - orig_s2):
        active = e in r
        if m.is_independent(s2 | {e}):  # e outside span(S2)
            if active:
                s2 = s2 | {e}
                steps.append({"e": e, "action": "add", "f": None, "active": True})
            else:
                s1 = s1 - {e}
                steps.append({"e": e, "action": "drop", "f": None, "active": False})
        else:
            f = m.find_exchange_pair(s1, s2, e)
            if active:
                s2 = (s2 - {f}) | {e}
            else:
                s1 = (s1 - {e}) | {f}
            steps.append({"e": e, "action": "swap", "f": f, "active": active})
    t = s2
    # Output guarantees, asserted on every call.
    if not (
        m.is_independent(t)
        and orig_s1 & orig_s2 <= t
        and (orig_s1 - orig_s2) & r <= t
        and t <= (orig_s1 & r) | orig_s2
    ):
        raise InvariantError("exchange augmentation violated its contract")
    return t, ExchangeTrace(tuple(steps))


def construct_I(matroids, q_list, r) -> frozenset:
    """Stitch a feasible active subset out of optimum samples Q_1..Q_tau.

    Implements the double loop: at step t the working solution becomes
    Q_t ∩ R, and every later sample Q_i is replaced by the intersection of
    the per-matroid exchange maps construct_T(M_l, Q_t, Q_i, R).
    """
    matroids = tuple(matroids)
    qs = [frozenset(q) for q in q_list]
    r = frozenset(r)
    for q in qs:
        if not all(m.is_independent(q) for m in matroids):
            raise PreconditionError("every Q_t must be feasible in all matroids")
    tau = len(qs)
    out: frozenset = frozenset()
    for t in range(tau):
        out = qs[t] & r
        for i in range(t + 1, tau):
            ts = [construct_T(m, qs[t], qs[i], r)[0] for m in matroids]
            qs[i] = frozenset.intersection(*ts)
            if not all(m.is_independent(qs[i]) for m in matroids):
                raise InvariantError("updated sample left the intersection")
    return out


def crucial_threshold(p: float, eps: float) -> float:
    if not 0.0 < eps < 1.0:
        raise PreconditionError("epsilon must lie in (0, 1)")
    return eps**3 * p / (20.0 * math.log(1.0 / eps))


def classify_crucial(q: Marginals, p: float, eps: float):
    """Split elements into crucial (q_e >= threshold) and non-crucial."""
    thr = crucial_threshold(p, eps)
    crucial = frozenset(e for e, qe in enumerate(q.q) if qe >= thr)
    noncrucial = frozenset(e for e, _ in enumerate(q.q)) - crucial
    return crucial, noncrucial


def augment_matching(m_crs, m_nc, graph: MatchingSystem) -> frozenset:
    """Add non-crucial edges whose endpoints the growing matching leaves free.

    Edges of M_NC are scanned in ascending id; each is added iff both its
    endpoints are unmatched in the current augmented matching (which also
    guards against conflicts inside M_NC itself).
    """
    m_crs = graph._check_domain(m_crs)
    m_nc = graph._check_domain(m_nc)
    if not graph.is_feasible(m_crs) or not graph.is_feasible(m_nc):
        raise PreconditionError("both inputs must be matchings")
    matched = set()
    for e in m_crs:
        matched.update(graph.edges[e])
    aug = set(m_crs)
    for e in sorted(m_nc):
        u, v = graph.edges[e]
        if u not in matched and v not in matched:
            aug.add(e)
            matched.update((u, v))
    return frozenset(aug)


def split_copies(p: float, eps: float) -> tuple[float, int, float]:
    """(exact c, ceil(c), new activation probability) for edge splitting."""
    if not 0.0 < p < 1.0:
        raise PreconditionError("splitting requires p in (0, 1)")
    if not 0.0 < eps < 1.0:
        raise PreconditionError("epsilon must lie in (0, 1)")
    p_new = eps**4 * p
    c = math.log(1.0 / (1.0 - p)) / math.log(1.0 / (1.0 - p_new))
    return c, math.ceil(c), p_new


def split_edges(inst: SppInstance, eps: float):
    """Replace every edge by ceil(c) equal-weight parallel copies.

    Returns (new instance, copy_map) where copy_map[e] lists the new edge
    ids of e's copies.  A sparsifier Q̃ on the split instance pulls back
    to the original via pull_back: e ∈ Q iff any copy of e is in Q̃.
    """
    if inst.system.kind != "matching":
        raise KindError("split_edges requires a matching system")
    if inst.objective.kind != "additive":
        raise KindError("split_edges requires an additive objective")
    c, copies, p_new = split_copies(inst.p, eps)
    g = inst.system
    new_edges = []
    new_w = []
    copy_map: dict = {}
    for e in g.ground:
        ids = []
        for _ in range(copies):
            ids.append(len(new_edges))
            new_edges.append(g.edges[e])
            new_w.append(inst.objective.w[e])
        copy_map[e] = tuple(ids)
    from .objectives import Additive

    new_inst = SppInstance(
        MatchingSystem(g.n_vertices, new_edges),
        Additive(new_w),
        p_new,
        inst.seed,
        name=(inst.name + "-split") if inst.name else "split",
    )
    return new_inst, copy_map


def pull_back(q_split, copy_map: dict) -> frozenset:
    """Original-instance query set induced by a split-instance query set."""
    qs = frozenset(q_split)
    return frozenset(e for e, ids in copy_map.items() if any(i in qs for i in ids))


def sparse_set_note(s: SparseSet) -> str:
    """One-line provenance note used by reports that consumed a stand-in M_NC."""
    return (
        f"producer={s.producer}; params={json.dumps(s.params, sort_keys=True)}; "
        "m_nc=max-weight-matching-stand-in"
    )

import math

import numpy as np
import pytest

from conftest import powerset
from sposs.certify import (
    ExchangeTrace,
    augment_matching,
    classify_crucial,
    construct_I,
    construct_T,
    crucial_threshold,
    pull_back,
    replay_trace,
    split_copies,
    split_edges,
)
from sposs.errors import KindError, PreconditionError
from sposs.matroids import Matroid
from sposs.objectives import Additive
from sposs.stochastic import Marginals, SppInstance, sample_active
from sposs.systems import MatchingSystem
from sposs.rng import substream


def check_contract(m, s1, s2, r, t):
    s1, s2, r = frozenset(s1), frozenset(s2), frozenset(r)
    assert m.is_independent(t)
    assert s1 & s2 <= t
    assert (s1 - s2) & r <= t
    assert t <= (s1 & r) | s2


class TestConstructT:
    def test_uniform_example(self):
        m = Matroid.uniform(4, 2)
        t, trace = construct_T(m, {0, 1}, {2, 3}, {0})
        assert t == frozenset({0, 3})
        assert replay_trace({0, 1}, {2, 3}, trace) == t

    def test_s1_equals_s2(self):
        m = Matroid.uniform(4, 2)
        t, trace = construct_T(m, {0, 1}, {0, 1}, {0})
        assert t == frozenset({0, 1})
        assert trace.steps == ()

    def test_empty_r_gives_s2(self):
        m = Matroid.uniform(5, 2)
        t, _ = construct_T(m, {0, 1}, {3, 4}, frozenset())
        assert t == frozenset({3, 4})

    def test_trace_json_roundtrip(self):
        m = Matroid.uniform(4, 2)
        _, trace = construct_T(m, {0, 1}, {2, 3}, {0})
        again = ExchangeTrace.from_json(trace.to_json())
        assert again == trace
        assert replay_trace({0, 1}, {2, 3}, again) == frozenset({0, 3})

    def test_contract_random(self, rng):
        for _ in range(40):
            fam = rng.integers(0, 2)
            if fam == 0:
                m = Matroid.uniform(8, int(rng.integers(2, 5)))
            else:
                m = Matroid.graphic(5, [(int(rng.integers(0, 5)),
                                         int(rng.integers(0, 5)))
                                        for _ in range(8)])
            indep = [s for s in powerset(m.ground) if m.is_independent(s)]
            s1 = indep[int(rng.integers(0, len(indep)))]
            s2 = indep[int(rng.integers(0, len(indep)))]
            r = frozenset(int(e) for e in np.flatnonzero(rng.random(8) < 0.5))
            t, trace = construct_T(m, s1, s2, r)
            check_contract(m, s1, s2, r, t)
            assert replay_trace(s1, s2, trace) == t

    def test_dependent_inputs_rejected(self):
        m = Matroid.uniform(4, 2)
        with pytest.raises(PreconditionError):
            construct_T(m, {0, 1, 2}, {3}, set())


class TestConstructI:
    def _matroids(self):
        m1 = Matroid.partition([[0, 1, 2], [3, 4, 5]], [1, 1])
        m2 = Matroid.partition([[0, 3], [1, 4], [2, 5]], [1, 1, 1])
        return (m1, m2)

    def test_single_sample(self):
        ms = self._matroids()
        out = construct_I(ms, [{0, 4}], {0})
        assert out == frozenset({0})

    def test_identical_samples(self):
        ms = self._matroids()
        out = construct_I(ms, [{0, 4}, {0, 4}, {0, 4}], {4})
        assert out == frozenset({4})

    def test_output_feasible_active_random(self, rng):
        ms = self._matroids()
        feas = [s for s in powerset(range(6))
                if all(m.is_independent(s) for m in ms)]
        for _ in range(25):
            tau = int(rng.integers(1, 5))
            qs = [feas[int(rng.integers(0, len(feas)))] for _ in range(tau)]
            r = frozenset(int(e) for e in np.flatnonzero(rng.random(6) < 0.5))
            out = construct_I(ms, qs, r)
            assert out <= r
            assert all(m.is_independent(out) for m in ms)
            # The stitched set is at least the last sample's active part.
            assert len(out) >= len(qs[-1] & r & out)

    def test_infeasible_sample_rejected(self):
        ms = self._matroids()
        with pytest.raises(PreconditionError):
            construct_I(ms, [{0, 1}], set())


class TestCrucial:
    def test_threshold_value(self):
        # 0.1^3 * 0.5 / (20 * ln 10) = 1.0857e-5
        assert crucial_threshold(0.5, 0.1) == pytest.approx(
            1.0857362e-5, rel=1e-5
        )

    def test_classification(self):
        q = Marginals(np.array([0.2, 0.0, 1e-9]), 0, "exact")
        crucial, noncrucial = classify_crucial(q, p=0.5, eps=0.1)
        assert crucial == frozenset({0})
        assert noncrucial == frozenset({1, 2})

    def test_partition_of_ground(self):
        q = Marginals(np.array([0.3, 0.1, 0.01, 0.0]), 0, "exact")
        c, nc = classify_crucial(q, 0.5, 0.3)
        assert c | nc == frozenset(range(4))
        assert not (c & nc)


class TestAugmentMatching:
    def test_path_example(self):
        # Path a-b-c-d as edges 0=(a,b), 1=(b,c), 2=(c,d): with M_CRS empty
        # and M_NC = {ab, cd} wait -- scan keeps both; the informative case
        # is M_CRS = {bc}: neither ab nor cd conflicts check.
        g = MatchingSystem(4, [(0, 1), (1, 2), (2, 3)])
        assert augment_matching({1}, {0, 2}, g) == frozenset({1})
        assert augment_matching(set(), {1}, g) == frozenset({1})

    def test_conflicting_edge_skipped(self):
        # Edge 1 shares vertex 1 with the already-matched edge 0.
        g = MatchingSystem(4, [(0, 1), (1, 2), (2, 3)])
        assert augment_matching({0}, {1}, g) == frozenset({0})

    def test_result_is_matching_random(self, rng):
        g = MatchingSystem(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5),
                               (5, 0), (0, 2), (1, 4)])
        matchings = [s for s in powerset(g.ground) if g.is_feasible(s)]
        for _ in range(30):
            a = matchings[int(rng.integers(0, len(matchings)))]
            b = matchings[int(rng.integers(0, len(matchings)))]
            out = augment_matching(a, b, g)
            assert g.is_feasible(out)
            assert a <= out
            assert out <= a | b

    def test_non_matching_rejected(self):
        g = MatchingSystem(3, [(0, 1), (1, 2)])
        with pytest.raises(PreconditionError):
            augment_matching({0, 1}, set(), g)


class TestSplitting:
    def test_copies_example(self):
        # p = 0.5, eps = 0.5: c = ln 2 / ln(1/(1 - 0.03125)) = 21.832 -> 22.
        c, copies, p_new = split_copies(0.5, 0.5)
        assert c == pytest.approx(21.8323, abs=1e-3)
        assert copies == 22
        assert p_new == pytest.approx(0.03125)

    def test_activation_probability_identity(self):
        # Pr[some copy active] == original p when c is used un-rounded.
        for p in (0.2, 0.5, 0.9):
            for eps in (0.3, 0.6):
                c, _, p_new = split_copies(p, eps)
                assert 1 - (1 - p_new) ** c == pytest.approx(p, abs=1e-12)

    def test_split_edges_structure(self):
        g = MatchingSystem(3, [(0, 1), (1, 2)])
        inst = SppInstance(g, Additive([2.0, 3.0]), 0.5, 7, name="tri")
        new_inst, copy_map = split_edges(inst, 0.9)
        c, copies, p_new = split_copies(0.5, 0.9)
        assert new_inst.p == pytest.approx(p_new)
        assert new_inst.name == "tri-split"
        assert len(new_inst.system.ground) == 2 * copies
        for e, ids in copy_map.items():
            assert len(ids) == copies
            for i in ids:
                assert new_inst.system.edges[i] == g.edges[e]
                assert new_inst.objective.w[i] == inst.objective.w[e]

    def test_pull_back(self):
        copy_map = {0: (0, 1), 1: (2, 3)}
        assert pull_back({1}, copy_map) == frozenset({0})
        assert pull_back({2, 3}, copy_map) == frozenset({1})
        assert pull_back(set(), copy_map) == frozenset()

    def test_split_preserves_activation_distribution(self):
        # The pulled-back active set (any copy active) matches Bernoulli(p)
        # when c is rounded up, i.e. its activation rate is >= p.
        g = MatchingSystem(3, [(0, 1), (1, 2)])
        inst = SppInstance(g, Additive([1.0, 1.0]), 0.4, 7)
        new_inst, copy_map = split_edges(inst, 0.8)
        hits = 0
        trials = 20000
        for t in range(trials):
            r = sample_active(new_inst, substream(3, t))
            if 0 in pull_back(r, copy_map):
                hits += 1
        rate = hits / trials
        assert rate >= inst.p - 0.01
        c, copies, p_new = split_copies(inst.p, 0.8)
        expected = 1 - (1 - p_new) ** copies
        assert rate == pytest.approx(expected, abs=0.01)

    def test_kind_checks(self):
        from sposs.systems import Rank1System

        inst = SppInstance(Rank1System(2), Additive([1.0, 1.0]), 0.5, 0)
        with pytest.raises(KindError):
            split_edges(inst, 0.5)
        with pytest.raises(PreconditionError):
            split_copies(1.0, 0.5)

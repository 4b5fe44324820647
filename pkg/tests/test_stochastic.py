import math

import numpy as np
import pytest

from conftest import powerset
from sposs.errors import KindError, PreconditionError, SizeLimitError
from sposs.matroids import Matroid
from sposs.objectives import Additive, Coverage
from sposs.rng import substream
from sposs.sparsify import EmptySparsifier, FixedSparsifier, IdentitySparsifier
from sposs.stochastic import (
    ENUM_CAP,
    SppInstance,
    enumerate_active_sets,
    estimate_marginals,
    evaluate_sparsifier,
    exact_expected_opt,
    exact_marginals,
    sample_active,
    stochastic_opt,
)
from sposs.systems import MatchingSystem, MatroidSystem, Rank1System


def rank1_inst(w, p, seed=1, name="r1"):
    return SppInstance(Rank1System(len(w)), Additive(w), p, seed, name)


def uniform_inst(n, r, w, p, seed=1):
    return SppInstance(MatroidSystem(Matroid.uniform(n, r)), Additive(w),
                       p, seed, "u")


class TestInstanceContract:
    def test_p_zero_rejected(self):
        with pytest.raises(PreconditionError):
            rank1_inst([1.0], 0.0)

    def test_p_above_one_rejected(self):
        with pytest.raises(PreconditionError):
            rank1_inst([1.0], 1.5)

    def test_ground_mismatch(self):
        with pytest.raises(PreconditionError):
            SppInstance(Rank1System(3), Additive([1.0]), 0.5, 0)


class TestSampling:
    def test_subset_of_ground(self):
        inst = rank1_inst([1.0] * 8, 0.4)
        r = sample_active(inst, substream(3, "t"))
        assert r <= frozenset(range(8))

    def test_p_one_all_active(self):
        inst = rank1_inst([1.0] * 8, 1.0)
        assert sample_active(inst, substream(3, "t")) == frozenset(range(8))

    def test_frequency(self):
        inst = rank1_inst([1.0] * 4, 0.3)
        rng = substream(9, "freq")
        hits = sum(len(sample_active(inst, rng)) for _ in range(20000))
        mean = hits / (20000 * 4)
        assert mean == pytest.approx(0.3, abs=0.01)


class TestStochasticOpt:
    def test_additive_matches_brute(self, rng):
        inst = uniform_inst(6, 2, rng.random(6), 0.5)
        for _ in range(10):
            r = frozenset(int(e) for e in np.flatnonzero(rng.random(6) < 0.5))
            got = stochastic_opt(inst, r)
            best = max(
                (sum(inst.objective.w[e] for e in t)
                 for t in powerset(r) if inst.system.is_feasible(t)),
                default=0.0,
            )
            assert got.weight == pytest.approx(best)
            assert got.elements <= r

    def test_coverage_matches_brute(self, rng):
        obj = Coverage(6, [list(np.flatnonzero(rng.random(6) < 0.5))
                           for _ in range(5)])
        inst = SppInstance(MatroidSystem(Matroid.uniform(5, 2)), obj, 0.5, 0)
        for _ in range(10):
            r = frozenset(int(e) for e in np.flatnonzero(rng.random(5) < 0.6))
            got = stochastic_opt(inst, r)
            best = max(
                (obj.evaluate(t) for t in powerset(r)
                 if inst.system.is_feasible(t)),
                default=0.0,
            )
            assert got.weight == pytest.approx(best)

    def test_coverage_partition_matches_brute(self, rng):
        obj = Coverage(6, [list(np.flatnonzero(rng.random(6) < 0.5))
                           for _ in range(6)])
        m = Matroid.partition([[0, 1, 2], [3, 4, 5]], [1, 2])
        inst = SppInstance(MatroidSystem(m), obj, 0.5, 0)
        for _ in range(10):
            r = frozenset(int(e) for e in np.flatnonzero(rng.random(6) < 0.6))
            got = stochastic_opt(inst, r)
            best = max(
                (obj.evaluate(t) for t in powerset(r)
                 if inst.system.is_feasible(t)),
                default=0.0,
            )
            assert got.weight == pytest.approx(best)

    def test_coverage_unsupported_kind(self):
        obj = Coverage(2, [[0], [1], [0, 1]])
        inst = SppInstance(MatchingSystem(3, [(0, 1), (1, 2), (0, 2)]),
                           obj, 0.5, 0)
        with pytest.raises(KindError):
            stochastic_opt(inst, {0, 1, 2})


class TestEnumeration:
    def test_probabilities_sum_to_one(self):
        inst = rank1_inst([1.0] * 5, 0.3)
        total = math.fsum(p for _, p in enumerate_active_sets(inst))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_cap(self):
        inst = rank1_inst([1.0] * (ENUM_CAP + 1), 0.3)
        with pytest.raises(SizeLimitError):
            list(enumerate_active_sets(inst))


class TestExactMarginals:
    def test_rank1_closed_form(self):
        # Heaviest wins whenever active; next wins when heavier inactive.
        inst = rank1_inst([3.0, 2.0, 1.0], 0.5)
        q = exact_marginals(inst).q
        assert q[0] == pytest.approx(0.5)
        assert q[1] == pytest.approx(0.25)
        assert q[2] == pytest.approx(0.125)

    def test_rank1_tie_break(self):
        inst = rank1_inst([1.0, 1.0], 1.0)
        q = exact_marginals(inst).q
        assert tuple(q) == (1.0, 0.0)

    def test_sum_q_equals_nonempty_prob(self):
        n, p = 10, 0.2
        inst = rank1_inst([float(n - e) for e in range(n)], p)
        q = exact_marginals(inst).q
        assert q.sum() == pytest.approx(1 - (1 - p) ** n, abs=1e-12)

    def test_invariants(self, rng):
        inst = uniform_inst(7, 3, rng.random(7), 0.4)
        q = exact_marginals(inst).q
        assert (q <= inst.p + 1e-12).all()
        assert (q >= 0).all()
        assert q.sum() <= inst.system.rank() + 1e-12


class TestExactExpectedOpt:
    def test_q_ground_equals_default(self, rng):
        inst = uniform_inst(6, 2, rng.random(6), 0.5)
        assert exact_expected_opt(inst) == pytest.approx(
            exact_expected_opt(inst, q_set=inst.system.ground)
        )

    def test_empty_q(self):
        inst = rank1_inst([1.0, 2.0], 0.5)
        assert exact_expected_opt(inst, q_set=frozenset()) == 0.0

    def test_rank1_closed_form(self):
        inst = rank1_inst([2.0, 1.0], 0.5)
        # E[opt] = 0.5*2 + 0.25*1.
        assert exact_expected_opt(inst) == pytest.approx(1.25)


class TestEstimateMarginals:
    def test_converges_to_exact(self):
        inst = rank1_inst([3.0, 2.0, 1.0], 0.5)
        exact = exact_marginals(inst).q
        est = estimate_marginals(inst, 20000, seed=4)
        assert est.estimator == "empirical"
        np.testing.assert_allclose(est.q, exact, atol=0.02)

    def test_clamp_shifts_down(self):
        inst = rank1_inst([3.0, 2.0, 1.0], 0.5)
        plain = estimate_marginals(inst, 500, seed=4).q
        shifted = estimate_marginals(inst, 500, seed=4, clamp=0.3).q
        assert (shifted <= plain + 1e-12).all()
        np.testing.assert_allclose(
            shifted, np.maximum(0.0, plain - 0.1), atol=1e-12
        )

    def test_reproducible_and_order_independent_substreams(self):
        inst = rank1_inst([3.0, 2.0, 1.0], 0.5)
        a = estimate_marginals(inst, 200, seed=4)
        b = estimate_marginals(inst, 200, seed=4)
        np.testing.assert_array_equal(a.q, b.q)


class TestEvaluateSparsifier:
    def test_identity_ratio_exactly_one(self, rng):
        inst = uniform_inst(8, 3, rng.random(8), 0.5)
        rep = evaluate_sparsifier(inst, IdentitySparsifier(inst), 200, seed=2)
        assert rep.ratio_mean == 1.0
        assert rep.degree_mean == pytest.approx(8 / 3)
        assert rep.trials == 200

    def test_empty_ratio_zero(self, rng):
        inst = uniform_inst(8, 3, rng.random(8), 0.5)
        rep = evaluate_sparsifier(inst, EmptySparsifier(inst), 100, seed=2)
        assert rep.ratio_mean == 0.0
        assert rep.degree_mean == 0.0

    def test_fixed_q_matches_exact_expectation(self, rng):
        w = rng.random(8)
        inst = uniform_inst(8, 3, w, 0.5)
        q = frozenset({0, 2, 5})
        rep = evaluate_sparsifier(inst, FixedSparsifier(inst, q), 40000, seed=6)
        exact_ratio = exact_expected_opt(inst, q_set=q) / exact_expected_opt(inst)
        assert rep.ratio_mean == pytest.approx(
            exact_ratio, abs=4 * rep.ratio_stderr + 1e-9
        )

    def test_bit_reproducible(self, rng):
        inst = uniform_inst(6, 2, rng.random(6), 0.4)
        a = evaluate_sparsifier(inst, IdentitySparsifier(inst), 300, seed=9)
        b = evaluate_sparsifier(inst, IdentitySparsifier(inst), 300, seed=9)
        assert (a.ratio_mean, a.ratio_stderr, a.opt_mean) == (
            b.ratio_mean, b.ratio_stderr, b.opt_mean
        )

    def test_threads_match_serial(self, rng):
        inst = uniform_inst(6, 2, rng.random(6), 0.4)
        q = frozenset({1, 3})
        serial = evaluate_sparsifier(inst, FixedSparsifier(inst, q), 200,
                                     seed=9, threads=1)
        parallel = evaluate_sparsifier(inst, FixedSparsifier(inst, q), 200,
                                       seed=9, threads=4)
        assert serial.ratio_mean == parallel.ratio_mean
        assert serial.opt_mean == parallel.opt_mean

    def test_coverage_path(self):
        obj = Coverage(4, [[0, 1], [1, 2], [2, 3], [0, 3]])
        inst = SppInstance(MatroidSystem(Matroid.uniform(4, 2)), obj, 0.6, 0)
        rep = evaluate_sparsifier(inst, IdentitySparsifier(inst), 200, seed=3)
        assert rep.ratio_mean == 1.0
        assert 0.0 < rep.opt_mean <= 4.0

    def test_trials_validated(self, rng):
        inst = uniform_inst(4, 2, rng.random(4), 0.5)
        with pytest.raises(PreconditionError):
            evaluate_sparsifier(inst, IdentitySparsifier(inst), 0, seed=1)

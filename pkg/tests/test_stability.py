import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from bigrank.model import AnswerPair, DomainError, ModelParams, choice_prob_first, choose_best_prob, initial_selection_prob
from bigrank.stability import (
    NoStableRegionError,
    critical_a_worst,
    is_stable,
    normal_ppf,
    phase_diagram,
    recency_asymptote,
    recency_fixed_point_rhs,
    s_crit,
)


class TestCriticalS:
    def test_values(self):
        assert s_crit(0.0).s_crit == 0.5
        assert s_crit(0.2).s_crit == pytest.approx(0.625, abs=1e-15)

    def test_half_has_no_stable_region(self):
        crit = s_crit(0.5)
        assert crit.s_crit == 1.0
        assert not crit.stable_region_exists
        assert not s_crit(0.7).stable_region_exists
        assert s_crit(0.49).stable_region_exists

    def test_domain(self):
        with pytest.raises(DomainError):
            s_crit(1.0)
        with pytest.raises(DomainError):
            s_crit(-0.1)


class TestCriticalA:
    def test_p_02_against_quantile_oracle(self):
        oracle = 2 * stats.norm.ppf(0.625)
        assert critical_a_worst(0.2) == pytest.approx(oracle, abs=1e-9)
        assert critical_a_worst(0.2) == pytest.approx(0.637, abs=1e-3)

    def test_vanishes_as_bias_vanishes(self):
        assert critical_a_worst(0.0) == 0.0
        assert critical_a_worst(1e-6) < 1e-5

    def test_monotone(self):
        values = [critical_a_worst(p) for p in np.linspace(0, 0.49, 50)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_no_solution(self):
        with pytest.raises(NoStableRegionError):
            critical_a_worst(0.5)

    @pytest.mark.parametrize("p", [0.05, 0.1, 0.2, 0.3, 0.4])
    def test_brute_force_scan_of_choice_inequality(self, p):
        params = ModelParams(p, 0.09)
        grid = np.arange(0.0, 6.0, 1e-3)
        # best (0) last vs worst first
        ok = [choose_best_prob(AnswerPair(a, 0.0), params, best_first=False)
              > choice_prob_first(AnswerPair(a, 0.0), params) for a in grid]
        first_stable = grid[int(np.argmax(ok))]
        assert abs(first_stable - critical_a_worst(p)) <= 1e-3

    @pytest.mark.parametrize("r", [0.0, 0.09, 0.5])
    def test_inequality_flips_at_boundary(self, r):
        p = 0.2
        params = ModelParams(p, r)
        crit = critical_a_worst(p)
        for a, stable in ((crit + 0.05, True), (crit - 0.05, False)):
            best_last = choose_best_prob(AnswerPair(a, 0.0), params, best_first=False)
            worst_first = choice_prob_first(AnswerPair(a, 0.0), params)
            assert (best_last > worst_first) is stable


def test_normal_ppf_matches_scipy():
    for prob in np.linspace(1e-6, 1 - 1e-6, 101):
        assert normal_ppf(prob) == pytest.approx(stats.norm.ppf(prob), abs=1e-10)


class TestPhaseDiagram:
    def test_examples(self):
        pts = {(pt.p, pt.a_worst): pt.stable for pt in phase_diagram([0.2, 0.6], [0.3, 1.0, 5.0])}
        assert pts[(0.2, 1.0)]
        assert not pts[(0.2, 0.3)]
        assert not any(pts[(0.6, a)] for a in (0.3, 1.0, 5.0))

    def test_boundary_is_unstable(self):
        crit = critical_a_worst(0.2)
        assert not phase_diagram([0.2], [crit])[0].stable

    def test_size_and_agreement(self):
        ps, as_ = np.linspace(0, 0.5, 7), np.linspace(0, 2, 9)
        pts = phase_diagram(ps, as_)
        assert len(pts) == 63
        for pt in pts:
            assert pt.stable == is_stable(pt.p, pt.a_worst)

    def test_rejects_negative_a(self):
        with pytest.raises(DomainError):
            phase_diagram([0.1], [-0.1])


class TestRecency:
    @given(st.floats(0, 1), st.floats(0, 1))
    def test_symmetric_point(self, p, r):
        assert recency_asymptote(0.5, ModelParams(p, r)) == pytest.approx(0.5, abs=1e-12)

    @given(st.floats(0, 1), st.floats(0, 0.999))
    def test_no_random_choice(self, q, p):
        assert recency_asymptote(q, ModelParams(p, 0.0)) == pytest.approx(q, abs=1e-12)

    def test_hand_substitution(self):
        val = recency_asymptote(0.625, ModelParams(0.2, 0.09))
        assert val == pytest.approx((2 * 0.8 * 0.91 * 0.625 + 0.09) / (2 - 2 * 0.2 * 0.91), abs=1e-15)
        assert val == pytest.approx(0.611, abs=1e-3)

    def test_fixed_point(self):
        rng = np.random.default_rng(9)
        for _ in range(1000):
            q, p, r = rng.random(3)
            params = ModelParams(p, r)
            x = recency_asymptote(q, params)
            assert recency_fixed_point_rhs(x, q, params) == pytest.approx(x, abs=1e-12)

    def test_rhs_uses_model_probabilities(self):
        params = ModelParams(0.2, 0.09)
        a = 0.8
        q = initial_selection_prob(AnswerPair(0, a))
        first = choose_best_prob(AnswerPair(0, a), params, True)
        last = choose_best_prob(AnswerPair(a, 0), params, False)
        assert recency_fixed_point_rhs(0.3, q, params) == pytest.approx(0.3 * first + 0.7 * last, abs=1e-15)


def test_recency_pure_position_bias_alternates():
    # the order flips on every vote; the limit r -> 0 at p = 1 is also 1/2
    assert recency_asymptote(0.9, ModelParams(1.0, 0.0)) == 0.5
    assert recency_asymptote(0.9, ModelParams(1.0, 1e-9)) == pytest.approx(0.5, abs=1e-6)

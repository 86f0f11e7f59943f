import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import optimize

from bigrank.model import AnswerPair, DomainError, ModelParams, choice_prob_first
from bigrank.raicr import (
    EPS,
    VoteLedger,
    conditional_choice_probs,
    golden_section_max,
    ledger_log_likelihood,
    mle_quality,
    rank_decision,
    sample_ledger,
)


@st.composite
def ledgers(draw, max_count=300):
    N_t = draw(st.integers(0, max_count))
    N_b = draw(st.integers(0, max_count))
    return VoteLedger(draw(st.integers(0, N_t)), N_t, draw(st.integers(0, N_b)), N_b)


params_st = st.builds(ModelParams, st.floats(0, 0.9), st.floats(0, 0.9))


class TestLedger:
    def test_validation(self):
        with pytest.raises(DomainError):
            VoteLedger(3, 2, 0, 0)
        with pytest.raises(DomainError):
            VoteLedger(-1, 2, 0, 0)

    def test_record_and_complement(self):
        led = VoteLedger()
        for shown_first, chosen in [(True, True), (True, False), (False, True)]:
            led.record(shown_first, chosen)
        assert led == VoteLedger(1, 2, 1, 1)
        assert led.complement() == VoteLedger(0, 1, 1, 2)
        assert led.complement().complement() == led


class TestConditionalProbs:
    def test_unbiased(self):
        c = conditional_choice_probs(0.5, ModelParams(0, 0))
        assert (c.first, c.last, c.other_first, c.other_last) == (0.5, 0.5, 0.5, 0.5)

    def test_position_only(self):
        c = conditional_choice_probs(0.5, ModelParams(0.2, 0))
        assert (c.first, c.last) == pytest.approx((0.6, 0.4), abs=1e-15)

    def test_configurations_sum_to_one(self):
        rng = np.random.default_rng(0)
        for q, p, r in rng.random((1000, 3)):
            c = conditional_choice_probs(q, ModelParams(p, r))
            assert c.first + c.other_last == pytest.approx(1.0, abs=1e-15)
            assert c.last + c.other_first == pytest.approx(1.0, abs=1e-15)

    def test_agrees_with_choice_model(self):
        params = ModelParams(0.2, 0.09)
        for a in (0.1, 0.637, 1.5):
            q = 1 - choice_prob_first(AnswerPair(a, 0.0), ModelParams(0, 0))
            c = conditional_choice_probs(q, params)
            assert c.first == pytest.approx(choice_prob_first(AnswerPair(0.0, a), params), abs=1e-15)
            assert c.last == pytest.approx(1 - choice_prob_first(AnswerPair(a, 0.0), params), abs=1e-15)


class TestLogLikelihood:
    def test_empty(self):
        assert ledger_log_likelihood(VoteLedger(), 0.3, ModelParams(0.2, 0.1)) == 0.0

    def test_single_bernoulli(self):
        assert ledger_log_likelihood(VoteLedger(1, 1, 0, 0), 0.37, ModelParams(0, 0)) == pytest.approx(math.log(0.37))

    def test_zero_probability_sentinel(self):
        assert ledger_log_likelihood(VoteLedger(0, 1, 0, 0), 1.0, ModelParams(0, 0)) == -math.inf

    def test_concave(self):
        rng = np.random.default_rng(3)
        qs = np.linspace(0.01, 0.99, 99)
        h = qs[1] - qs[0]
        for _ in range(100):
            N_t, N_b = rng.integers(1, 500, size=2)
            led = VoteLedger(int(rng.integers(0, N_t + 1)), int(N_t), int(rng.integers(0, N_b + 1)), int(N_b))
            params = ModelParams(rng.random(), 0.99 * rng.random())
            ll = np.array([ledger_log_likelihood(led, q, params) for q in qs])
            second = (ll[2:] - 2 * ll[1:-1] + ll[:-2]) / h**2
            assert np.all(second <= 1e-6 * np.abs(ll[1:-1]).max())


class TestMLE:
    def test_position_irrelevant(self):
        est = mle_quality(VoteLedger(30, 50, 20, 50), ModelParams(0, 0))
        assert est.q_hat == pytest.approx(0.5, abs=1e-9)
        assert not est.rank_first

    def test_plug_in_inversion(self):
        est = mle_quality(VoteLedger(60, 100, 40, 100), ModelParams(0.2, 0))
        assert est.q_hat == pytest.approx(0.5, abs=1e-9)

    def test_closed_form_when_unbiased(self):
        est = mle_quality(VoteLedger(70, 90, 5, 10), ModelParams(0, 0))
        assert est.q_hat == pytest.approx(75 / 100, abs=1e-9)
        assert est.rank_first

    def test_boundary_maximum(self):
        est = mle_quality(VoteLedger(5, 5, 3, 3), ModelParams(0.2, 0.09))
        assert est.q_hat == pytest.approx(1 - EPS, abs=1e-9)
        assert est.rank_first

    def test_empty_is_uninformed(self):
        est = mle_quality(VoteLedger(), ModelParams(0.2, 0.09), current_first=True)
        assert est.uninformed and est.q_hat == 0.5 and est.rank_first
        assert not mle_quality(VoteLedger(), ModelParams(0.2, 0.09)).rank_first

    def test_matches_scipy_bounded_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            params = ModelParams(0.4 * rng.random(), 0.3 * rng.random())
            led = sample_ledger(rng.uniform(0.2, 0.8), params, 300, 200, rng)
            oracle = optimize.minimize_scalar(lambda q: -ledger_log_likelihood(led, q, params),
                                              bounds=(EPS, 1 - EPS), method="bounded",
                                              options={"xatol": 1e-12})
            assert mle_quality(led, params).q_hat == pytest.approx(oracle.x, abs=1e-6)

    def test_consistency(self):
        rng = np.random.default_rng(17)
        params = ModelParams(0.2, 0.09)
        led = sample_ledger(0.7, params, 10**5, 10**5, rng)
        assert mle_quality(led, params).q_hat == pytest.approx(0.7, abs=0.01)

    @given(ledgers(), params_st)
    def test_symmetry(self, led, params):
        assume(led.total > 0)
        a = mle_quality(led, params).q_hat
        b = mle_quality(led.complement(), params).q_hat
        assert a + b == pytest.approx(1.0, abs=1e-6)

    @given(ledgers(max_count=100), params_st, st.integers(2, 50))
    def test_rank_invariant_under_scaling(self, led, params, k):
        scaled = VoteLedger(led.n_t * k, led.N_t * k, led.n_b * k, led.N_b * k)
        assert mle_quality(scaled, params).rank_first == mle_quality(led, params).rank_first

    @given(ledgers(), params_st)
    def test_score_sign_matches_estimate(self, led, params):
        est = mle_quality(led, params)
        assume(abs(est.q_hat - 0.5) > 1e-7)
        assert est.rank_first == (est.q_hat > 0.5)
        assert rank_decision(led, params) == (1 if est.q_hat > 0.5 else -1)


def test_golden_section_on_parabola():
    x, fx = golden_section_max(lambda x: -(x - 0.3) ** 2, 0.0, 1.0, tol=1e-10)
    assert x == pytest.approx(0.3, abs=1e-5)
    x, _ = golden_section_max(lambda x: x, 0.0, 1.0)
    assert x == 1.0


def test_mismatched_random_rate_barely_hurts():
    true = ModelParams(0.2, 0.09)
    rng = np.random.default_rng(21)
    correct = {True: 0, False: 0}
    n = 0
    for q in (0.52, 0.55, 0.6, 0.65, 0.7):
        for _ in range(400):
            led = sample_ledger(q, true, 250, 250, rng)
            n += 1
            correct[True] += mle_quality(led, true).rank_first
            correct[False] += mle_quality(led, ModelParams(0.2, 0.0)).rank_first
    assert (correct[True] - correct[False]) / n < 0.02

"""Quality inference from position-conditioned votes (RAICR ranking).

For one designated answer X the ledger holds how often X was chosen while
listed first (``n_t`` of ``N_t`` votes) and while listed last (``n_b`` of
``N_b`` votes). With known ``p`` and ``r`` the only unknown is ``q``, the
probability that a latent guess lies closer to X than to its opponent. X is
ranked first when the maximum-likelihood ``q`` exceeds 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DomainError, ModelParams

EPS = 1e-9
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class VoteLedger:
    n_t: int = 0
    N_t: int = 0
    n_b: int = 0
    N_b: int = 0

    def __post_init__(self):
        for name in ("n_t", "N_t", "n_b", "N_b"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {v!r}")
            setattr(self, name, int(v))
        if self.n_t > self.N_t or self.n_b > self.N_b:
            raise DomainError(f"chosen counts exceed shown counts: {self}")

    @property
    def total(self) -> int:
        return self.N_t + self.N_b

    def record(self, shown_first: bool, chosen: bool) -> None:
        if shown_first:
            self.N_t += 1
            self.n_t += chosen
        else:
            self.N_b += 1
            self.n_b += chosen

    def complement(self) -> VoteLedger:
        """The opposing answer's ledger over the same votes."""
        return VoteLedger(n_t=self.N_b - self.n_b, N_t=self.N_b, n_b=self.N_t - self.n_t, N_b=self.N_t)


@dataclass(frozen=True)
class ConditionalProbs:
    first: float
    last: float
    other_first: float
    other_last: float


@dataclass(frozen=True)
class QualityEstimate:
    q_hat: float
    log_likelihood_at_max: float
    rank_first: bool
    uninformed: bool = False


def conditional_choice_probs(q: float, params: ModelParams) -> ConditionalProbs:
    """Choice probabilities of X (closeness ``q``) and of its opponent by position.

    ``first``/``last`` are P(X chosen | X listed first/last); ``other_*`` are
    the same for the opponent, whose closeness is ``1 - q``. Within a display
    configuration the two answers' probabilities sum to one.
    """
    if not (math.isfinite(q) and 0.0 <= q <= 1.0):
        raise DomainError(f"q must lie in [0, 1], got {q}")
    p, r = params.p, params.r
    first = r / 2.0 + (1.0 - r) * (p + (1.0 - p) * q)
    last = r / 2.0 + (1.0 - r) * (1.0 - p) * q
    other_first = r / 2.0 + (1.0 - r) * (p + (1.0 - p) * (1.0 - q))
    other_last = r / 2.0 + (1.0 - r) * (1.0 - p) * (1.0 - q)
    return ConditionalProbs(first, last, other_first, other_last)


def _xlogy(x: float, y: float) -> float:
    if x == 0:
        return 0.0
    if y <= 0.0:
        return -math.inf
    return x * math.log(y)


def ledger_log_likelihood(ledger: VoteLedger, q: float, params: ModelParams) -> float:
    probs = conditional_choice_probs(q, params)
    return (_xlogy(ledger.n_t, probs.first)
            + _xlogy(ledger.N_t - ledger.n_t, 1.0 - probs.first)
            + _xlogy(ledger.n_b, probs.last)
            + _xlogy(ledger.N_b - ledger.n_b, 1.0 - probs.last))


def ledger_score(ledger: VoteLedger, q: float, params: ModelParams) -> float:
    """d(log-likelihood)/dq; decreasing in q because the likelihood is concave."""
    probs = conditional_choice_probs(q, params)
    slope = (1.0 - params.r) * (1.0 - params.p)
    return slope * (ledger.n_t / probs.first - (ledger.N_t - ledger.n_t) / (1.0 - probs.first)
                    + ledger.n_b / probs.last - (ledger.N_b - ledger.n_b) / (1.0 - probs.last))


def _polish(ledger: VoteLedger, q: float, params: ModelParams, width: float = 1e-6) -> float:
    """Refine an interior maximum by bisection on the score sign.

    Near the optimum the log-likelihood is flat to rounding, so comparing
    function values cannot resolve q much below 1e-8; the score can.
    """
    lo, hi = max(EPS, q - width), min(1.0 - EPS, q + width)
    try:
        if not (ledger_score(ledger, lo, params) > 0.0 > ledger_score(ledger, hi, params)):
            return q
    except ZeroDivisionError:
        return q
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if ledger_score(ledger, mid, params) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def uninformative(params: ModelParams) -> bool:
    """Votes carry no information about q when p == 1 or r == 1."""
    return params.p == 1.0 or params.r == 1.0


def score_at_half(n_t, N_t, n_b, N_b, params: ModelParams):
    """Sign-equivalent of d(log-likelihood)/dq at q = 1/2.

    Works elementwise on numpy arrays of counts. The log-likelihood is
    concave in q, so the maximiser exceeds 1/2 exactly when this is positive.
    """
    p, r = params.p, params.r
    # at q = 1/2 P(X chosen | last) == 1 - P(X chosen | first)
    p_first = r / 2.0 + (1.0 - r) * (p + (1.0 - p) * 0.5)
    p_last = 1.0 - p_first
    return (n_t - (N_b - n_b)) / p_first + (n_b - (N_t - n_t)) / p_last


def rank_decision(ledger: VoteLedger, params: ModelParams) -> int:
    """+1 to rank X first, -1 to rank its opponent first, 0 for no preference."""
    if ledger.total == 0 or uninformative(params):
        return 0
    score = score_at_half(ledger.n_t, ledger.N_t, ledger.n_b, ledger.N_b, params)
    return int(np.sign(score))


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-9, max_iter: int = 200) -> tuple[float, float]:
    """Maximise a unimodal ``f`` on ``[lo, hi]``; endpoints are candidates too."""
    a, b = lo, hi
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
    x_best, f_best = (x1, f1) if f1 >= f2 else (x2, f2)
    for x in (lo, hi):
        fx = f(x)
        if fx > f_best:
            x_best, f_best = x, fx
    return x_best, f_best


def mle_quality(ledger: VoteLedger, assumed_params: ModelParams, current_first: bool = False) -> QualityEstimate:
    """Maximum-likelihood closeness q of the ledger's answer.

    An empty ledger (or p == 1, r == 1, where votes say nothing about q)
    gives q_hat = 0.5 with ``rank_first = current_first`` and is flagged
    uninformed. ``rank_first`` comes from the sign of the score at 1/2,
    which agrees with ``q_hat > 0.5`` and does not depend on search tolerance.
    """
    if ledger.total == 0 or uninformative(assumed_params):
        return QualityEstimate(0.5, ledger_log_likelihood(ledger, 0.5, assumed_params),
                               rank_first=current_first, uninformed=True)
    q_hat, _ = golden_section_max(
        lambda q: ledger_log_likelihood(ledger, q, assumed_params), EPS, 1.0 - EPS)
    q_hat = _polish(ledger, q_hat, assumed_params)
    ll = ledger_log_likelihood(ledger, q_hat, assumed_params)
    decision = rank_decision(ledger, assumed_params)
    rank_first = current_first if decision == 0 else decision > 0
    return QualityEstimate(q_hat, ll, rank_first)


def sample_ledger(q: float, params: ModelParams, N_t: int, N_b: int, rng: np.random.Generator) -> VoteLedger:
    """Draw a ledger for an answer with closeness ``q`` shown N_t times first, N_b last."""
    probs = conditional_choice_probs(q, params)
    return VoteLedger(int(rng.binomial(N_t, probs.first)), N_t, int(rng.binomial(N_b, probs.last)), N_b)

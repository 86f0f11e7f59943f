"""Biased Initial Guess (BIG) model of choosing between two ranked answers.

A voter shown two normalized answers picks the first-listed one with
probability ``p``, picks uniformly at random with probability ``r``, and
otherwise picks whichever answer lies closer to a latent standard-normal
initial guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT2 = math.sqrt(2.0)


class DomainError(ValueError):
    """Raised for inputs outside an operation's mathematical domain."""


def _check_finite(*values: float) -> None:
    for v in values:
        if not isinstance(v, (int, float, np.floating, np.integer)) or not math.isfinite(v):
            raise DomainError(f"expected a finite real, got {v!r}")


@dataclass(frozen=True)
class ModelParams:
    """Position-bias probability ``p`` and random-choice probability ``r``."""

    p: float
    r: float

    def __post_init__(self):
        for name in ("p", "r"):
            v = getattr(self, name)
            _check_finite(v)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
            object.__setattr__(self, name, float(v))


@dataclass(frozen=True)
class AnswerPair:
    """Two normalized answers; ``first`` is the top-displayed one."""

    first: float
    last: float

    def __post_init__(self):
        _check_finite(self.first, self.last)
        object.__setattr__(self, "first", float(self.first))
        object.__setattr__(self, "last", float(self.last))

    def swapped(self) -> AnswerPair:
        return AnswerPair(self.last, self.first)


@dataclass(frozen=True)
class ChoiceOutcome:
    chose_first: bool


def normal_cdf(x: float) -> float:
    """Standard normal CDF, accurate in both tails."""
    return 0.5 * math.erfc(-x / SQRT2)


def initial_selection_prob(pair: AnswerPair) -> float:
    """Probability that a standard-normal guess lies closer to ``pair.first``."""
    a1, a2 = pair.first, pair.last
    _check_finite(a1, a2)
    if a1 == a2:
        return 0.5
    mid = (a1 + a2) / (2.0 * SQRT2)
    if a1 > a2:
        return 0.5 * math.erfc(mid)
    # erfc(-x) == 1 + erf(x), without cancellation for large negative x
    return 0.5 * math.erfc(-mid)


def choice_prob_first(pair: AnswerPair, params: ModelParams) -> float:
    s = initial_selection_prob(pair)
    return params.r / 2.0 + (1.0 - params.r) * (params.p + (1.0 - params.p) * s)


def choice_prob_last(pair: AnswerPair, params: ModelParams) -> float:
    return 1.0 - choice_prob_first(pair, params)


def best_is_first(pair: AnswerPair) -> bool:
    """The answer closer to zero is best; ties in |A| favour the first one."""
    return abs(pair.first) <= abs(pair.last)


def choose_best_prob(pair: AnswerPair, params: ModelParams, best_first: bool) -> float:
    """Probability the designated best answer is chosen given its position.

    ``pair`` holds the two answer values in display order. ``best_first``
    says which of them is the designated best answer. When the best answer
    is last its choice probability is ``r/2 + (1-r)(1-p) s(best, worst)``,
    i.e. the first-position value minus ``p(1-r)``.
    """
    if best_first:
        return choice_prob_first(pair, params)
    return params.r / 2.0 + (1.0 - params.r) * (1.0 - params.p) * initial_selection_prob(pair.swapped())


def sample_choice(pair: AnswerPair, params: ModelParams, rng: np.random.Generator) -> ChoiceOutcome:
    """One Bernoulli draw; consumes exactly one uniform double from ``rng``."""
    return ChoiceOutcome(bool(rng.random() < choice_prob_first(pair, params)))

"""Monte-Carlo simulation of sequential voters ranking two answers.

Each voter sees the current order, chooses per the BIG model, and the policy
reorders. ``run_trial`` is the reference single-trial loop; ``run_experiment``
advances many trials in lock-step with numpy but consumes each trial's random
stream exactly as ``run_trial`` does, so trial ``i`` of an experiment equals
``run_trial`` with seed ``child_seed(master, i)``.

Random stream layout per trial: one uniform for the initial order (only when
both answers start with equal votes), then one uniform per vote.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .fit import BetaPosterior, beta_interval
from .model import AnswerPair, DomainError, ModelParams, choice_prob_first, sample_choice
from .raicr import VoteLedger, rank_decision, score_at_half, uninformative
from .seeding import child_seed, parallel_map

VOTE_CHUNK = 4096


@dataclass(frozen=True)
class Popularity:
    """Order by total votes; equal totals keep the current order.

    The worst answer starts ``initial_advantage`` votes ahead; the best answer
    may be given its own ``best_head_start``.
    """

    initial_advantage: int = 0
    best_head_start: int = 0

    def __post_init__(self):
        for name in ("initial_advantage", "best_head_start"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {v}")

    @property
    def label(self) -> str:
        if self.best_head_start:
            return f"popularity:{self.initial_advantage}:best+{self.best_head_start}"
        return f"popularity:{self.initial_advantage}"


@dataclass(frozen=True)
class Recency:
    """The most recently chosen answer goes first."""

    @property
    def label(self) -> str:
        return "recency"


@dataclass(frozen=True)
class Quality:
    """RAICR: the answer with inferred closeness above 1/2 goes first."""

    assumed_params: ModelParams

    @property
    def label(self) -> str:
        return f"quality:p={self.assumed_params.p:g},r={self.assumed_params.r:g}"


RankingPolicy = Union[Popularity, Recency, Quality]


def head_start(policy: RankingPolicy) -> tuple[int, int]:
    """Initial (best, worst) vote totals."""
    if isinstance(policy, Popularity):
        return policy.best_head_start, policy.initial_advantage
    return 0, 0


@dataclass(frozen=True)
class TrialConfig:
    a_worst: float
    true_params: ModelParams
    policy: RankingPolicy
    num_votes: int
    seed: int = 0
    a_best: float = 0.0

    def __post_init__(self):
        if self.num_votes < 1:
            raise DomainError(f"num_votes must be >= 1, got {self.num_votes}")
        if self.a_best == self.a_worst:
            raise DomainError("a_best and a_worst must differ")


@dataclass
class TrialResult:
    best_first_at_end: bool
    votes_best: int
    votes_worst: int
    ledger: VoteLedger
    trajectory: np.ndarray = field(repr=False)  # best_first after each vote


@dataclass(frozen=True)
class CheckpointEstimate:
    checkpoint: int
    successes: int
    trials: int
    prob_best_first: float
    mean: float
    ci_low: float
    ci_high: float
    sd: float


def _first_probs(config: TrialConfig) -> tuple[float, float]:
    """P(first listed chosen) with the best answer first, and with the worst first."""
    best_first = choice_prob_first(AnswerPair(config.a_best, config.a_worst), config.true_params)
    worst_first = choice_prob_first(AnswerPair(config.a_worst, config.a_best), config.true_params)
    return best_first, worst_first


def run_trial(config: TrialConfig) -> TrialResult:
    rng = np.random.default_rng(config.seed)
    policy = config.policy
    votes_best, votes_worst = head_start(policy)
    if votes_best == votes_worst:
        best_first = bool(rng.random() < 0.5)
    else:
        best_first = votes_best > votes_worst
    ledger = VoteLedger()
    trajectory = np.empty(config.num_votes, dtype=bool)
    pairs = {True: AnswerPair(config.a_best, config.a_worst), False: AnswerPair(config.a_worst, config.a_best)}

    for step in range(config.num_votes):
        outcome = sample_choice(pairs[best_first], config.true_params, rng)
        chose_best = outcome.chose_first == best_first
        ledger.record(shown_first=best_first, chosen=chose_best)
        if chose_best:
            votes_best += 1
        else:
            votes_worst += 1

        if isinstance(policy, Popularity):
            if votes_best != votes_worst:
                best_first = votes_best > votes_worst
        elif isinstance(policy, Recency):
            best_first = chose_best
        else:
            decision = rank_decision(ledger, policy.assumed_params)
            if decision:
                best_first = decision > 0
        trajectory[step] = best_first

    return TrialResult(best_first, votes_best, votes_worst, ledger, trajectory)


def _simulate_batch(config: TrialConfig, seeds: Sequence[int], checkpoints: Sequence[int]) -> np.ndarray:
    """best_first for each (checkpoint, trial), trials advanced together."""
    policy = config.policy
    n = len(seeds)
    rngs = [np.random.default_rng(s) for s in seeds]
    start_best, start_worst = head_start(policy)
    if start_best == start_worst:
        best_first = np.array([g.random() < 0.5 for g in rngs], dtype=bool)
    else:
        best_first = np.full(n, start_best > start_worst)
    p_bf, p_wf = _first_probs(config)

    votes_best = np.full(n, start_best, dtype=np.int64)
    votes_worst = np.full(n, start_worst, dtype=np.int64)
    n_t = np.zeros(n, dtype=np.int64)
    N_t = np.zeros(n, dtype=np.int64)
    n_b = np.zeros(n, dtype=np.int64)
    N_b = np.zeros(n, dtype=np.int64)
    quality_live = isinstance(policy, Quality) and not uninformative(policy.assumed_params)

    wanted = {c: i for i, c in enumerate(sorted(set(checkpoints)))}
    out = np.zeros((len(wanted), n), dtype=bool)
    total = max(wanted)
    done = 0
    while done < total:
        chunk = min(VOTE_CHUNK, total - done)
        u = np.stack([g.random(chunk) for g in rngs], axis=1)
        for row in u:
            chose_first = row < np.where(best_first, p_bf, p_wf)
            chose_best = chose_first == best_first
            chosen = chose_best.astype(np.int64)
            N_t += best_first
            n_t += chosen & best_first
            N_b += ~best_first
            n_b += chosen & ~best_first
            votes_best += chosen
            votes_worst += 1 - chosen

            if isinstance(policy, Popularity):
                best_first = np.where(votes_best == votes_worst, best_first, votes_best > votes_worst)
            elif isinstance(policy, Recency):
                best_first = chose_best
            elif quality_live:
                score = score_at_half(n_t, N_t, n_b, N_b, policy.assumed_params)
                best_first = np.where(score == 0.0, best_first, score > 0.0)
            done += 1
            if done in wanted:
                out[wanted[done]] = best_first
    return out


def run_experiment(template: TrialConfig, num_trials: int, checkpoints: Sequence[int] | None = None,
                   n_jobs: int = 1, mass: float = 0.95) -> list[CheckpointEstimate]:
    """Fraction of trials with the best answer first at each checkpoint.

    Trial ``i`` uses seed ``child_seed(template.seed, i)``. Intervals are
    equal-tailed Beta posterior intervals under a uniform prior.
    """
    if num_trials < 1:
        raise DomainError(f"num_trials must be >= 1, got {num_trials}")
    checkpoints = sorted(set(checkpoints or [template.num_votes]))
    if checkpoints[0] < 1:
        raise DomainError("checkpoints must be >= 1")
    config = replace(template, num_votes=checkpoints[-1])
    seeds = [child_seed(template.seed, i) for i in range(num_trials)]
    n_chunks = max(1, min(n_jobs, num_trials))
    bounds = np.linspace(0, num_trials, n_chunks + 1).astype(int)
    parts = parallel_map(lambda k: _simulate_batch(config, seeds[bounds[k]:bounds[k + 1]], checkpoints),
                         range(n_chunks), n_jobs)
    best_first = np.concatenate(parts, axis=1)

    estimates = []
    for c, row in zip(checkpoints, best_first):
        s = int(row.sum())
        post = beta_interval(BetaPosterior(s, num_trials - s), mass)
        estimates.append(CheckpointEstimate(c, s, num_trials, s / num_trials, post.mean, post.low, post.high, post.sd))
    return estimates

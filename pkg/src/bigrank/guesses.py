"""Cleaning raw numeric guesses and mapping them to z-scores of log guesses."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import DomainError

GUESS_MIN = 1.0
GUESS_MAX = 1e6


class InsufficientDataError(ValueError):
    pass


class DegenerateSampleError(ValueError):
    pass


@dataclass
class GuessSample:
    question_id: str
    guesses: list[float]
    removed: int = 0


@dataclass(frozen=True)
class NormalizationStats:
    mean_log: float
    std_log: float
    n: int


def _as_guess(value) -> float | None:
    if isinstance(value, bool):
        return None
    try:
        g = float(value)
    except (TypeError, ValueError):
        return None
    if not math.isfinite(g) or g < GUESS_MIN or g > GUESS_MAX:
        return None
    return g


def clean_guesses(raw: Iterable, question_id: str = "") -> GuessSample:
    """Drop non-numeric, non-finite and out-of-range guesses, keeping order.

    Bounds are inclusive: a guess survives iff ``1 <= g <= 1e6``.
    """
    raw = list(raw)
    kept = [g for g in map(_as_guess, raw) if g is not None]
    if len(kept) < 2:
        raise InsufficientDataError(
            f"question {question_id!r}: {len(kept)} valid guesses, need at least 2")
    return GuessSample(question_id, kept, removed=len(raw) - len(kept))


def fit_stats(sample: GuessSample, center: float | None = None) -> NormalizationStats:
    """Mean and sample standard deviation (ddof=1) of log guesses.

    ``center`` replaces the mean of logs by ``ln(center)``, e.g. to center on
    a known true answer. The spread is always taken about the sample mean.
    """
    logs = np.log(np.asarray(sample.guesses, dtype=float))
    n = len(logs)
    if n < 2:
        raise InsufficientDataError("need at least 2 guesses")
    std = float(np.std(logs, ddof=1))
    if not std > 0.0:
        raise DegenerateSampleError(f"question {sample.question_id!r}: zero variance in log guesses")
    if center is None:
        mean = float(np.mean(logs))
    else:
        if not (math.isfinite(center) and center > 0):
            raise DomainError(f"center must be a positive finite value, got {center!r}")
        mean = math.log(center)
    return NormalizationStats(mean, std, n)


def normalize(guess: float, stats: NormalizationStats) -> float:
    if not isinstance(guess, (int, float, np.number)) or not math.isfinite(guess) or guess < GUESS_MIN:
        raise DomainError(f"guess must be finite and >= {GUESS_MIN}, got {guess!r}")
    return (math.log(guess) - stats.mean_log) / stats.std_log


def normalize_sample(sample: GuessSample, stats: NormalizationStats | None = None) -> np.ndarray:
    stats = stats or fit_stats(sample)
    return (np.log(np.asarray(sample.guesses, dtype=float)) - stats.mean_log) / stats.std_log


def lognormal_qq(sample: GuessSample) -> list[tuple[float, float]]:
    """(standard-normal quantile, sorted normalized guess) pairs.

    Plotting positions are ``(i - 0.5) / n``.
    """
    values = np.sort(normalize_sample(sample))
    n = len(values)
    inv = statistics.NormalDist().inv_cdf
    return [(inv((i - 0.5) / n), float(v)) for i, v in enumerate(values, start=1)]


def group_by_question(rows: Sequence[tuple[str, object]]) -> dict[str, list]:
    """Collect raw guesses per question id, preserving first-seen order."""
    out: dict[str, list] = {}
    for qid, value in rows:
        out.setdefault(qid, []).append(value)
    return out

"""Stability of popularity ranking between two answers, and the recency limit.

Popularity ranking is stable when the best answer, even listed last, is
chosen more often than the worst answer listed first. With the best answer
at 0 this happens iff ``s(0, a_worst) > 1 / (2 (1 - p))``, independent of r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .model import DomainError, ModelParams, normal_cdf


class NoStableRegionError(DomainError):
    """Raised when position bias is so strong (p >= 0.5) that no gap is stable."""


@dataclass(frozen=True)
class CriticalValue:
    s_crit: float
    stable_region_exists: bool


@dataclass(frozen=True)
class PhasePoint:
    p: float
    a_worst: float
    stable: bool


def _bisect(f, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Root of an increasing function with f(lo) <= 0 <= f(hi)."""
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def normal_ppf(prob: float, tol: float = 1e-14) -> float:
    """Inverse standard normal CDF by bisection on the erfc-based CDF."""
    if not 0.0 < prob < 1.0:
        raise DomainError(f"quantile needs a probability in (0, 1), got {prob}")
    return _bisect(lambda x: normal_cdf(x) - prob, -40.0, 40.0, tol=tol)


def s_crit(p: float) -> CriticalValue:
    if not (math.isfinite(p) and 0.0 <= p < 1.0):
        raise DomainError(f"p must lie in [0, 1), got {p}")
    value = 1.0 / (2.0 * (1.0 - p))
    return CriticalValue(value, stable_region_exists=value < 1.0)


def critical_a_worst(p: float, tol: float = 1e-10) -> float:
    """Worst-answer value where popularity ranking switches to stable.

    Solves ``Phi(a / 2) = s_crit(p)`` for ``a > 0`` by bisection.
    """
    if not (math.isfinite(p) and p >= 0.0):
        raise DomainError(f"p must be a probability, got {p}")
    if p >= 0.5:
        raise NoStableRegionError(f"no stable popularity region for p={p} >= 0.5")
    target = s_crit(p).s_crit
    if target == 0.5:
        return 0.0
    hi = 1.0
    while normal_cdf(hi / 2.0) < target:
        hi *= 2.0
        if hi > 80.0:
            raise NoStableRegionError(f"critical value for p={p} exceeds the representable range")
    return _bisect(lambda a: normal_cdf(a / 2.0) - target, 0.0, hi, tol=tol)


def is_stable(p: float, a_worst: float) -> bool:
    """True iff popularity ranking eventually puts the best answer (0) first.

    Points exactly on the boundary count as unstable.
    """
    if p >= 0.5:
        return False
    return abs(a_worst) > critical_a_worst(p)


def phase_diagram(p_grid: Iterable[float], a_grid: Iterable[float]) -> list[PhasePoint]:
    a_values = [float(a) for a in a_grid]
    if any(not math.isfinite(a) or a < 0 for a in a_values):
        raise DomainError("a_worst grid values must be finite and >= 0")
    points = []
    for p in p_grid:
        p = float(p)
        crit = critical_a_worst(p) if p < 0.5 else math.inf
        points.extend(PhasePoint(p, a, a > crit) for a in a_values)
    return points


def recency_asymptote(q: float, params: ModelParams) -> float:
    """Long-run probability that recency ranking shows the best answer first.

    ``q`` is the probability a latent guess is closer to the best answer.
    """
    if not (math.isfinite(q) and 0.0 <= q <= 1.0):
        raise DomainError(f"q must lie in [0, 1], got {q}")
    p, r = params.p, params.r
    denom = 2.0 - 2.0 * p * (1.0 - r)
    if denom == 0.0:
        # p=1, r=0: every vote goes to whichever answer is first, so the order alternates
        return 0.5
    return (2.0 * (1.0 - p) * (1.0 - r) * q + r) / denom


def recency_fixed_point_rhs(x: float, q: float, params: ModelParams) -> float:
    """Right-hand side of the recency self-consistency relation at ``x``."""
    p, r = params.p, params.r
    best_first = r / 2.0 + (1.0 - r) * (p + (1.0 - p) * q)
    best_last = r / 2.0 + (1.0 - r) * (1.0 - p) * q
    return best_first * x + best_last * (1.0 - x)

"""Fitting (p, r) to observed two-option choices, with the usual diagnostics.

Covers maximum-likelihood fits, bootstrap standard errors, likelihood-ratio
tests against the nested models with p and/or r pinned to zero, a
parametric-bootstrap goodness-of-fit probability, and Beta posteriors for
success rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize, special, stats

from .model import AnswerPair, DomainError, ModelParams, initial_selection_prob
from .seeding import child_rng, parallel_map

PROB_FLOOR = 1e-300
STARTS = ((0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0), (0.5, 0.5))
RESTRICTIONS = {"p": 1, "r": 1, "both": 2}


class InsufficientDataError(ValueError):
    pass


class OptimizerError(RuntimeError):
    pass


@dataclass(frozen=True)
class ChoiceRecord:
    a_first: float
    a_last: float
    chose_first: bool

    def __post_init__(self):
        if not (math.isfinite(self.a_first) and math.isfinite(self.a_last)):
            raise DomainError(f"answer values must be finite: {self}")


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters. ``p_err``/``r_err`` stay None until bootstrapped."""

    p_hat: float
    r_hat: float
    log_likelihood: float
    n: int
    p_err: float | None = None
    r_err: float | None = None
    degenerate: bool = False

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.p_hat, self.r_hat)


@dataclass(frozen=True)
class BootstrapErrors:
    p_err: float
    r_err: float
    estimates: np.ndarray = field(repr=False)
    degenerate: bool = False

    def __iter__(self):
        return iter((self.p_err, self.r_err))


@dataclass(frozen=True)
class LRTestResult:
    restricted: str
    statistic: float
    df: int
    p_value: float
    ll_full: float
    ll_restricted: float


@dataclass(frozen=True)
class GoodnessOfFit:
    p_value: float
    ll_empirical: float
    ll_synthetic: np.ndarray = field(repr=False)
    threshold: float = 0.1

    @property
    def agrees(self) -> bool:
        return self.p_value > self.threshold


@dataclass(frozen=True)
class BetaPosterior:
    successes: int
    failures: int

    def __post_init__(self):
        if self.successes < 0 or self.failures < 0:
            raise DomainError(f"counts must be non-negative: {self}")


@dataclass(frozen=True)
class BetaSummary:
    mle: float | None
    mean: float
    low: float
    high: float
    sd: float


# --- data plumbing --------------------------------------------------------

class ChoiceData:
    """Records reduced to what the likelihood needs: s(A1, A2) and the choice."""

    def __init__(self, s: np.ndarray, chose_first: np.ndarray):
        self.s = np.asarray(s, dtype=float)
        self.chose_first = np.asarray(chose_first, dtype=bool)

    @classmethod
    def from_records(cls, records: Iterable[ChoiceRecord]) -> ChoiceData:
        records = list(records)
        s = np.array([initial_selection_prob(AnswerPair(rec.a_first, rec.a_last)) for rec in records])
        chose = np.array([bool(rec.chose_first) for rec in records], dtype=bool)
        return cls(s, chose)

    def __len__(self):
        return len(self.s)

    def take(self, idx: np.ndarray) -> ChoiceData:
        return ChoiceData(self.s[idx], self.chose_first[idx])

    @property
    def degenerate(self) -> bool:
        """All pairs share one s value, so only (1-r)p is identified."""
        return len(self.s) == 0 or float(np.ptp(self.s)) < 1e-12


def _as_data(records) -> ChoiceData:
    return records if isinstance(records, ChoiceData) else ChoiceData.from_records(records)


def prob_first(p: float, r: float, s: np.ndarray) -> np.ndarray:
    return r / 2.0 + (1.0 - r) * (p + (1.0 - p) * s)


def log_likelihood(p: float, r: float, data: ChoiceData) -> float:
    pf = prob_first(p, r, data.s)
    prob = np.where(data.chose_first, pf, 1.0 - pf)
    return float(np.sum(np.log(np.maximum(prob, PROB_FLOOR))))


# --- fitting --------------------------------------------------------------

def _maximize(data: ChoiceData, free: str, starts=STARTS) -> tuple[float, float, float]:
    """Maximise over the free parameters ("pr", "p", "r" or "") in [0, 1]."""
    if free == "":
        return 0.0, 0.0, log_likelihood(0.0, 0.0, data)
    if free in ("p", "r"):
        def nll1(x):
            return -log_likelihood(x, 0.0, data) if free == "p" else -log_likelihood(0.0, x, data)
        res = optimize.minimize_scalar(nll1, bounds=(0.0, 1.0), method="bounded",
                                       options={"xatol": 1e-10})
        cands = [(float(res.x), -float(res.fun))] + [(x, -nll1(x)) for x in (0.0, 1.0)]
        x, ll = max(cands, key=lambda c: c[1])
        return (x, 0.0, ll) if free == "p" else (0.0, x, ll)

    def nll(x):
        return -log_likelihood(x[0], x[1], data)

    opts = {"xatol": 1e-8, "fatol": 1e-10, "maxiter": 4000}
    best = None
    for x0 in starts:
        res = optimize.minimize(nll, x0, method="Nelder-Mead", bounds=[(0, 1), (0, 1)], options=opts)
        if best is None or res.fun < best.fun:
            best = res
    # polish from the best start with a fresh simplex
    res = optimize.minimize(nll, best.x, method="Nelder-Mead", bounds=[(0, 1), (0, 1)], options=opts)
    if res.fun < best.fun:
        best = res
    p, r = (float(np.clip(v, 0.0, 1.0)) for v in best.x)
    return p, r, log_likelihood(p, r, data)


def fit_params(records: Sequence[ChoiceRecord] | ChoiceData, starts=STARTS) -> FitResult:
    """Maximum-likelihood (p, r) from multi-start bounded Nelder-Mead.

    Deterministic for fixed ``starts``. When every record has the same s value
    the two parameters are not separately identified and the fit is flagged
    ``degenerate``.
    """
    data = _as_data(records)
    if len(data) < 2:
        raise InsufficientDataError(f"need at least 2 choice records, got {len(data)}")
    p, r, ll = _maximize(data, "pr", starts)
    return FitResult(p, r, ll, len(data), degenerate=data.degenerate)


def bootstrap_errors(records, B: int = 1000, seed: int = 0, n_jobs: int = 1) -> BootstrapErrors:
    """Standard deviations of (p, r) refitted on B resamples with replacement.

    Resample ``b`` draws its indices from child stream ``b`` of ``seed``.
    ``estimates`` has one row ``(p_hat, r_hat, log_likelihood)`` per resample.
    """
    data = _as_data(records)
    if B < 1:
        raise DomainError(f"B must be >= 1, got {B}")
    n = len(data)

    def one(b: int):
        idx = child_rng(seed, b).integers(0, n, size=n)
        fit = fit_params(data.take(idx))
        return fit.p_hat, fit.r_hat, fit.log_likelihood

    est = np.array(parallel_map(one, range(B), n_jobs), dtype=float)
    sd = est[:, :2].std(axis=0)
    return BootstrapErrors(float(sd[0]), float(sd[1]), est, degenerate=B < 2)


def fit_with_errors(records, B: int = 1000, seed: int = 0, n_jobs: int = 1) -> FitResult:
    data = _as_data(records)
    fit = fit_params(data)
    errs = bootstrap_errors(data, B, seed, n_jobs)
    return FitResult(fit.p_hat, fit.r_hat, fit.log_likelihood, fit.n, errs.p_err, errs.r_err, fit.degenerate)


def chi2_sf(x: float, k: int) -> float:
    """Upper tail of chi-square(k) via the regularized upper incomplete gamma."""
    if x <= 0.0:
        return 1.0
    return float(special.gammaincc(k / 2.0, x / 2.0))


def likelihood_ratio_test(records, restricted: str, full: FitResult | None = None) -> LRTestResult:
    """Wilks test of the full model against p=0, r=0, or both pinned to zero."""
    if restricted not in RESTRICTIONS:
        raise DomainError(f"restricted must be one of {sorted(RESTRICTIONS)}, got {restricted!r}")
    data = _as_data(records)
    full = full or fit_params(data)
    free = {"p": "r", "r": "p", "both": ""}[restricted]
    rp, rr, ll_restricted = _maximize(data, free)
    ll_full = full.log_likelihood
    if ll_restricted > ll_full:
        # the restricted optimum is a valid start for the full model
        p, r, ll = _maximize(data, "pr", starts=((rp, rr),) + STARTS)
        ll_full = max(ll_full, ll)
        if ll_restricted - ll_full > 1e-9:
            raise OptimizerError(
                f"restricted fit beats full fit by {ll_restricted - ll_full:.3g} for restriction {restricted!r}")
    stat = max(0.0, 2.0 * (ll_full - ll_restricted))
    df = RESTRICTIONS[restricted]
    return LRTestResult(restricted, stat, df, chi2_sf(stat, df), ll_full, ll_restricted)


def goodness_of_fit(records, fitted: FitResult, B: int = 1000, seed: int = 0,
                    refit: bool = False, n_jobs: int = 1) -> GoodnessOfFit:
    """Parametric-bootstrap probability that model data fits worse than the observed data.

    Synthetic datasets keep the observed answer pairs and are drawn from the
    fitted parameters. By default their log-likelihood is evaluated at the
    fitted parameters; with ``refit`` each synthetic set is refitted and the
    empirical log-likelihood is the maximised one.
    """
    data = _as_data(records)
    p, r = fitted.p_hat, fitted.r_hat
    pf = prob_first(p, r, data.s)
    ll_emp = fitted.log_likelihood if refit else log_likelihood(p, r, data)

    def one(b: int) -> float:
        chose = child_rng(seed, b).random(len(data)) < pf
        synth = ChoiceData(data.s, chose)
        if refit:
            return fit_params(synth).log_likelihood
        return log_likelihood(p, r, synth)

    lls = np.array(parallel_map(one, range(B), n_jobs), dtype=float)
    return GoodnessOfFit(float(np.mean(lls < ll_emp)), ll_emp, lls)


def beta_interval(posterior: BetaPosterior, mass: float = 0.95) -> BetaSummary:
    """Uniform-prior Beta(S+1, F+1) posterior: MLE, mean, equal-tailed interval."""
    if not 0.0 < mass < 1.0:
        raise DomainError(f"mass must lie in (0, 1), got {mass}")
    s, f = posterior.successes, posterior.failures
    a, b = s + 1, f + 1
    tail = (1.0 - mass) / 2.0
    dist = stats.beta(a, b)
    mle = s / (s + f) if s + f > 0 else None
    return BetaSummary(mle, a / (a + b), float(dist.ppf(tail)), float(dist.ppf(1.0 - tail)), float(dist.std()))


# --- synthetic data -------------------------------------------------------

def simulate_records(params: ModelParams, n: int, rng: np.random.Generator,
                     pairs: np.ndarray | None = None) -> list[ChoiceRecord]:
    """Choices drawn from the BIG model; pairs default to iid standard normals."""
    if pairs is None:
        pairs = rng.standard_normal((n, 2))
    pairs = np.asarray(pairs, dtype=float)
    s = np.array([initial_selection_prob(AnswerPair(a1, a2)) for a1, a2 in pairs])
    chose = rng.random(len(pairs)) < prob_first(params.p, params.r, s)
    return [ChoiceRecord(float(a1), float(a2), bool(c)) for (a1, a2), c in zip(pairs, chose)]


def first_choice_rate(records: Sequence[ChoiceRecord]) -> float:
    return sum(rec.chose_first for rec in records) / len(records)

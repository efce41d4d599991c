"""Cohort statistics on log(K_z): fit, Pearson chi-square test, contributor tiers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateDistributionError, DomainError, InsufficientDataError

# standardized class boundaries; seven classes, the middle one straddles the mean
CLASS_Z = (-1.5, -1.0, -0.5, 0.5, 1.0, 1.5)
N_CLASSES = len(CLASS_Z) + 1
QUARTILE_Z = 0.67

_EPS = 1e-15
_TINY = 1e-300


@dataclass(frozen=True)
class LogKzStats:
    mu: float
    sigma: float
    n: int
    excluded: int = 0


@dataclass(frozen=True)
class GofReport:
    stats: LogKzStats
    class_edges: tuple[float, ...]
    observed: tuple[int, ...]
    expected: tuple[float, ...]
    chi_square: float
    dof: int
    alpha: float
    critical_value: float
    reject: bool
    exact_expected: bool = False


@dataclass(frozen=True)
class ContributorThresholds:
    alpha: float
    lower: float
    upper: float
    z_alpha: float


@dataclass(frozen=True)
class Classification:
    top: list[tuple[str, float]]
    middle: list[tuple[str, float]]
    bottom: list[tuple[str, float]]


def log_kz_stats(scores: Iterable[float]) -> LogKzStats:
    """Mean and population standard deviation of ln(K_z) over positive scores."""
    scores = list(scores)
    logs = [math.log(s) for s in scores if s > 0]
    n = len(logs)
    if n < 2:
        raise InsufficientDataError(f"need at least 2 positive K_z scores, got {n}")
    mu = math.fsum(logs) / n
    var = math.fsum((x - mu) ** 2 for x in logs) / n
    return LogKzStats(mu, math.sqrt(var), n, len(scores) - n)


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def normal_quantile(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p}")
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def class_edges(stats: LogKzStats) -> tuple[float, ...]:
    return tuple(stats.mu + z * stats.sigma for z in CLASS_Z)


def bin_observed(log_scores: Sequence[float], stats: LogKzStats) -> tuple[int, ...]:
    """Count log scores per class; each class includes its lower edge."""
    if stats.sigma <= 0:
        raise DegenerateDistributionError("sigma is zero; classes collapse to a point")
    idx = np.searchsorted(np.asarray(class_edges(stats)), np.asarray(log_scores, dtype=float), side="right")
    return tuple(int(c) for c in np.bincount(idx, minlength=N_CLASSES))


def class_probabilities() -> tuple[float, ...]:
    cdf = [0.0] + [normal_cdf(z) for z in CLASS_Z] + [1.0]
    return tuple(hi - lo for lo, hi in zip(cdf, cdf[1:]))


def _round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def expected_frequencies(n: int, exact: bool = False) -> tuple:
    """Expected class counts under a normal law, rounded to integers unless ``exact``."""
    if n < 0:
        raise DomainError(f"sample size must be non-negative, got {n}")
    raw = [n * p for p in class_probabilities()]
    if exact:
        return tuple(raw)
    return tuple(_round_half_away(e) for e in raw)


def chi_square_statistic(observed: Sequence[float], expected: Sequence[float]) -> float:
    if len(observed) != len(expected):
        raise ValueError(f"length mismatch: {len(observed)} observed vs {len(expected)} expected")
    if any(e <= 0 for e in expected):
        raise DomainError("every expected frequency must be positive")
    return math.fsum((o - e) ** 2 / e for o, e in zip(observed, expected))


def regularized_lower_gamma(a: float, x: float) -> float:
    """P(a, x): series below x = a + 1, Lentz continued fraction above."""
    if a <= 0:
        raise DomainError(f"shape must be positive, got {a}")
    if x < 0:
        raise DomainError(f"x must be non-negative, got {x}")
    if x == 0:
        return 0.0
    log_prefactor = -x + a * math.log(x) - math.lgamma(a)
    if x < a + 1.0:
        term = total = 1.0 / a
        ap = a
        for _ in range(10_000):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                break
        return min(1.0, total * math.exp(log_prefactor))

    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return max(0.0, 1.0 - math.exp(log_prefactor) * h)


def chi_square_cdf(x: float, dof: int) -> float:
    if x <= 0:
        return 0.0
    return regularized_lower_gamma(dof / 2.0, x / 2.0)


def chi_square_critical(dof: int, alpha: float) -> float:
    """Upper-alpha point of the chi-square law, by bisection on its CDF."""
    if dof < 1:
        raise DomainError(f"degrees of freedom must be >= 1, got {dof}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    target = 1.0 - alpha
    lo, hi = 0.0, float(max(dof, 1))
    while chi_square_cdf(hi, dof) < target:
        lo, hi = hi, hi * 2.0
        if hi > 1e6:
            raise DomainError(f"alpha {alpha} too small to resolve")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if chi_square_cdf(mid, dof) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gof_from_counts(
    observed: Sequence[int],
    stats: LogKzStats,
    alpha: float = 0.05,
    exact_expected: bool = False,
    strict_dof: bool = False,
) -> GofReport:
    """Assemble a report from already-binned class counts."""
    if len(observed) != N_CLASSES:
        raise ValueError(f"expected {N_CLASSES} class counts, got {len(observed)}")
    n = sum(observed)
    expected = expected_frequencies(n, exact=exact_expected)
    chi2 = chi_square_statistic(observed, expected)
    # strict: also subtract the two fitted parameters
    dof = N_CLASSES - 1 - (2 if strict_dof else 0)
    critical = chi_square_critical(dof, alpha)
    return GofReport(
        stats=stats,
        class_edges=class_edges(stats),
        observed=tuple(observed),
        expected=tuple(expected),
        chi_square=chi2,
        dof=dof,
        alpha=alpha,
        critical_value=critical,
        reject=chi2 > critical,
        exact_expected=exact_expected,
    )


def goodness_of_fit(
    scores: Iterable[float],
    alpha: float = 0.05,
    exact_expected: bool = False,
    strict_dof: bool = False,
) -> GofReport:
    scores = list(scores)
    stats = log_kz_stats(scores)
    logs = [math.log(s) for s in scores if s > 0]
    observed = bin_observed(logs, stats)
    return gof_from_counts(observed, stats, alpha, exact_expected, strict_dof)


def contributor_thresholds(stats: LogKzStats, alpha: float = 0.25) -> ContributorThresholds:
    """K_z cutoffs isolating the top and bottom ``alpha`` tails of the fitted log-normal.

    The quartile case keeps the conventional rounded score 0.67.
    """
    if not 0.0 < alpha < 0.5:
        raise DomainError(f"tail fraction must lie in (0, 0.5), got {alpha}")
    z = QUARTILE_Z if alpha == 0.25 else normal_quantile(1.0 - alpha)
    return ContributorThresholds(
        alpha=alpha,
        lower=math.exp(stats.mu - z * stats.sigma),
        upper=math.exp(stats.mu + z * stats.sigma),
        z_alpha=z,
    )


def classify(scores: Iterable[tuple[str, float]], thresholds: ContributorThresholds) -> Classification:
    """Split (id, K_z) pairs into top / middle / bottom; each tier sorted by K_z descending then id."""
    top, middle, bottom = [], [], []
    for rid, kz in scores:
        if kz >= thresholds.upper:
            top.append((rid, kz))
        elif kz <= thresholds.lower:
            bottom.append((rid, kz))
        else:
            middle.append((rid, kz))

    def order(tier):
        return sorted(tier, key=lambda item: (-item[1], item[0]))

    return Classification(order(top), order(middle), order(bottom))

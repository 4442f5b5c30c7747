"""Count distributions: classical-limit, generalized, and standard fractional Poisson.

The generalized family has mass p_k = lambda^k / [Gamma(beta + alpha k) E(lambda)]
with E the two-parameter Mittag-Leffler normalization; it is numerically tame.
The standard fractional family (through derivatives of the one-parameter
Mittag-Leffler function at a negated argument) is a violently cancelling
alternating series and is evaluated in arbitrary precision with automatic
escalation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional, Union

from mpmath import mp

from .combinatorics import stirling2
from .errors import (
    InvalidDistribution,
    InvalidParams,
    NonConvergence,
    PrecisionExhausted,
)
from .special_functions import (
    DEFAULT_CONTROL,
    MLParams,
    SeriesControl,
    _rgamma_signed_log,
    _safe_exp,
    ml_factorial_sums,
)

__all__ = [
    "GfpdParams",
    "SfpdParams",
    "PmfTable",
    "MomentVector",
    "ValidityResult",
    "gfpd_pmf",
    "gfpd_pmf_table",
    "gfpd_raw_moments",
    "gfpd_mean_variance",
    "gfpd_asymptotic_moments",
    "gfpd_validity_check",
    "sfpd_pmf",
    "sfpd_pmf_table",
    "sfpd_mean_variance",
]


@dataclass(frozen=True)
class GfpdParams:
    """(lambda, alpha, beta) of one generalized fractional Poisson distribution."""

    lam: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0.0):
            raise InvalidParams(f"GfpdParams: lambda must be finite and > 0, got {self.lam}")
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise InvalidParams(f"GfpdParams: alpha must be finite and > 0, got {self.alpha}")
        if not math.isfinite(self.beta):
            raise InvalidParams(f"GfpdParams: beta must be finite, got {self.beta}")

    def ml_params(self) -> MLParams:
        return MLParams(self.alpha, self.beta)


@dataclass(frozen=True)
class SfpdParams:
    """(alpha_s, nu, lambda) of one standard fractional Poisson distribution."""

    alpha_s: float
    nu: float
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha_s) and 0.0 < self.alpha_s <= 1.0):
            raise InvalidParams(f"SfpdParams: alpha_s must be in (0, 1], got {self.alpha_s}")
        if not (math.isfinite(self.nu) and self.nu > 0.0):
            raise InvalidParams(f"SfpdParams: nu must be finite and > 0, got {self.nu}")
        if not (math.isfinite(self.lam) and self.lam > 0.0):
            raise InvalidParams(f"SfpdParams: lambda must be finite and > 0, got {self.lam}")


@dataclass(frozen=True)
class PmfTable:
    params: Union[GfpdParams, SfpdParams]
    k_max: int
    probs: tuple[float, ...]
    tail_mass_bound: float

    def mode(self) -> int:
        return max(range(len(self.probs)), key=self.probs.__getitem__)


@dataclass(frozen=True)
class MomentVector:
    order_max: int
    raw: tuple[float, ...]  # mu_0 .. mu_order_max
    mean: float
    variance: float


class ValidityResult(NamedTuple):
    valid: bool
    first_negative_k: Optional[int]


@lru_cache(maxsize=None)
def _norm_signed_log(p: GfpdParams, ctl: SeriesControl) -> tuple[float, float]:
    """Cached (sign, log) of the normalization E_{alpha,beta}(lambda)."""
    sums = ml_factorial_sums(p.ml_params(), p.lam, 0, ctl)
    return sums.signed_log(0)


def gfpd_pmf(p: GfpdParams, k: int, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Mass at k: lambda^k / [Gamma(beta + alpha k) E_{alpha,beta}(lambda)].

    Exactly 0 when beta + alpha k is a nonpositive integer.  Raises
    InvalidDistribution when the term (or the normalization) is negative,
    which happens for some beta < 0.
    """
    if not isinstance(k, int) or k < 0:
        raise InvalidParams(f"gfpd_pmf: k must be a nonnegative integer, got {k!r}")
    nsign, nlog = _norm_signed_log(p, ctl)
    if nsign <= 0.0:
        raise InvalidDistribution(
            f"gfpd_pmf: normalization not positive for (lambda={p.lam}, "
            f"alpha={p.alpha}, beta={p.beta})"
        )
    tsign, tlog = _rgamma_signed_log(p.beta + p.alpha * k)
    if tsign == 0.0:
        return 0.0
    if tsign < 0.0:
        raise InvalidDistribution(
            f"gfpd_pmf: negative term at k={k} for (lambda={p.lam}, "
            f"alpha={p.alpha}, beta={p.beta}); not a valid mass function"
        )
    return _safe_exp(k * math.log(p.lam) + tlog - nlog)


def gfpd_pmf_table(p: GfpdParams, mass_tol: float = 1e-8,
                   ctl: SeriesControl = DEFAULT_CONTROL) -> PmfTable:
    """Adaptive table over k = 0..k_max.

    k_max is the smallest index at which the accumulated mass reaches
    1 - mass_tol and the current term has dropped below mass_tol/10.
    """
    if not (0.0 < mass_tol < 1e-3):
        raise InvalidParams(f"gfpd_pmf_table: mass_tol must be in (0, 1e-3), got {mass_tol}")
    probs: list[float] = []
    cum = 0.0
    k = 0
    while True:
        if k > ctl.max_terms:
            raise NonConvergence(
                f"gfpd_pmf_table: mass did not accumulate to 1 - {mass_tol} "
                f"within {ctl.max_terms} terms"
            )
        pk = gfpd_pmf(p, k, ctl)
        probs.append(pk)
        cum += pk
        if cum >= 1.0 - mass_tol and pk < mass_tol / 10.0:
            break
        k += 1
    return PmfTable(p, k, tuple(probs), max(0.0, 1.0 - cum))


def _moment_ratios(p: GfpdParams, order: int, ctl: SeriesControl) -> list[float]:
    """[T_m / T_0 for m = 0..order] with T_m = lambda^m E^(m)(lambda)."""
    sums = ml_factorial_sums(p.ml_params(), p.lam, order, ctl)
    if sums.mantissas[0] <= 0.0:
        raise InvalidDistribution(
            f"gfpd moments: normalization not positive for (lambda={p.lam}, "
            f"alpha={p.alpha}, beta={p.beta})"
        )
    return [m / sums.mantissas[0] for m in sums.mantissas]


def gfpd_raw_moments(p: GfpdParams, n: int,
                     ctl: SeriesControl = DEFAULT_CONTROL) -> MomentVector:
    """Raw moments mu_m = (1/E) sum_{k=1..m} S(m,k) lambda^k E^(k)(lambda), m <= n.

    The Stirling weights convert the falling-factorial sums into power
    moments; mu_0 = 1 exactly by construction.
    """
    if not isinstance(n, int) or n < 1:
        raise InvalidParams(f"gfpd_raw_moments: n must be a positive integer, got {n!r}")
    if n > 20:
        raise InvalidParams(f"gfpd_raw_moments: order capped at 20, got {n}")
    ratios = _moment_ratios(p, max(n, 2), ctl)
    raw = [1.0]
    for m in range(1, n + 1):
        raw.append(math.fsum(stirling2(m, k) * ratios[k] for k in range(1, m + 1)))
    mean = ratios[1]
    variance = (ratios[2] + ratios[1]) - ratios[1] ** 2
    if variance < 0.0:
        raise NonConvergence(
            f"gfpd_raw_moments: negative variance {variance} signals a "
            f"non-converged series for (lambda={p.lam}, alpha={p.alpha}, beta={p.beta})"
        )
    return MomentVector(n, tuple(raw), mean, variance)


def gfpd_mean_variance(p: GfpdParams,
                       ctl: SeriesControl = DEFAULT_CONTROL) -> tuple[float, float]:
    """(mean, variance) from the first and second Mittag-Leffler derivatives:
    mu = lambda E'/E and sigma = (lambda^2 E'' + lambda E')/E - mu^2.
    """
    ratios = _moment_ratios(p, 2, ctl)
    mean = ratios[1]
    variance = (ratios[2] + ratios[1]) - mean * mean
    if variance < 0.0:
        raise NonConvergence(
            f"gfpd_mean_variance: negative variance {variance} signals a "
            f"non-converged series for (lambda={p.lam}, alpha={p.alpha}, beta={p.beta})"
        )
    return mean, variance


def gfpd_asymptotic_moments(p: GfpdParams, regime: str) -> tuple[float, float]:
    """Limiting (mean, variance).

    small_lambda: both tend to  Gamma(beta)/Gamma(alpha+beta) * lambda.
    large_lambda: mean -> (1 - beta + lambda^(1/alpha))/alpha and
                  variance -> lambda^(1/alpha)/alpha^2  (needs 0 < alpha < 2).
    """
    if regime == "small_lambda":
        sb, lb = _rgamma_signed_log(p.beta)
        sab, lab = _rgamma_signed_log(p.alpha + p.beta)
        if sb == 0.0:
            raise InvalidParams(
                f"gfpd_asymptotic_moments: Gamma(beta) pole at beta={p.beta}"
            )
        # Gamma(beta)/Gamma(alpha+beta) = rgamma(alpha+beta)/rgamma(beta)
        c = sab * sb * _safe_exp(lab - lb)
        return c * p.lam, c * p.lam
    if regime == "large_lambda":
        if not (0.0 < p.alpha < 2.0):
            raise InvalidParams(
                f"gfpd_asymptotic_moments: large-lambda form requires 0 < alpha < 2, "
                f"got alpha={p.alpha}"
            )
        root = p.lam ** (1.0 / p.alpha)
        return (1.0 - p.beta + root) / p.alpha, root / p.alpha**2
    raise InvalidParams(
        f"gfpd_asymptotic_moments: regime must be 'small_lambda' or 'large_lambda', "
        f"got {regime!r}"
    )


def gfpd_validity_check(p: GfpdParams, k_max: int) -> ValidityResult:
    """Scan terms k = 0..k_max for a strictly negative mass contribution."""
    if not isinstance(k_max, int) or k_max < 0:
        raise InvalidParams(f"gfpd_validity_check: k_max must be >= 0, got {k_max!r}")
    for k in range(k_max + 1):
        sign, _ = _rgamma_signed_log(p.beta + p.alpha * k)
        if sign < 0.0:
            return ValidityResult(False, k)
    return ValidityResult(True, None)


class _NeedsMorePrecision(Exception):
    pass


def _sfpd_series(p: SfpdParams, k: int, ctl: SeriesControl,
                 precision_digits: int, dps: int) -> float:
    with mp.workdps(dps):
        mua = mp.mpf(p.nu) * mp.mpf(p.lam) ** mp.mpf(p.alpha_s)
        a = mp.mpf(p.alpha_s)
        # term_n = [(k+n)!/n!] (-mua)^n / Gamma(alpha_s (k+n) + 1)
        rising = mp.factorial(k)  # (k+n)!/n! at n = 0
        power = mp.mpf(1)
        s = mp.mpf(0)
        tmax = mp.mpf(0)
        stop_tol = mp.mpf(10) ** (-(dps - 8))
        small = 0
        converged = False
        for n in range(ctl.max_terms + 1):
            t = rising * power * mp.rgamma(a * (k + n) + 1)
            s += t
            at = abs(t)
            if at > tmax:
                tmax = at
            if s != 0 and at <= stop_tol * abs(s):
                small += 1
                if small >= ctl.consecutive_small:
                    converged = True
                    break
            else:
                small = 0
            rising *= mp.mpf(n + k + 1) / (n + 1)
            power *= -mua
        if not converged:
            raise NonConvergence(
                f"sfpd_pmf: series for k={k} did not converge within "
                f"{ctl.max_terms} terms (alpha_s={p.alpha_s}, nu={p.nu}, lambda={p.lam})"
            )
        # escalate when cancellation leaves fewer than precision_digits (+5
        # guard) of the working digits intact
        if s == 0 or tmax > abs(s) * mp.mpf(10) ** (dps - precision_digits - 5):
            raise _NeedsMorePrecision
        value = float(mua**k / mp.factorial(k) * s)
    if value < -1e-12 or value > 1.0 + 1e-12:
        raise _NeedsMorePrecision
    return min(max(value, 0.0), 1.0)


def sfpd_pmf(p: SfpdParams, k: int, ctl: SeriesControl = DEFAULT_CONTROL,
             precision_digits: int = 15) -> float:
    """Mass at k of the standard fractional Poisson distribution.

    The defining alternating series loses digits to cancellation; it is
    evaluated in arbitrary-precision floating point starting at
    max(34, precision_digits) digits, doubling (up to four times) whenever the
    largest intermediate term towers more than 10^(precision_digits - 5) over
    the partial sum.
    """
    if not isinstance(k, int) or k < 0:
        raise InvalidParams(f"sfpd_pmf: k must be a nonnegative integer, got {k!r}")
    if precision_digits < 15:
        raise InvalidParams(
            f"sfpd_pmf: precision_digits must be >= 15, got {precision_digits}"
        )
    dps = max(34, precision_digits)
    for _ in range(5):  # first attempt plus four doublings
        try:
            return _sfpd_series(p, k, ctl, precision_digits, dps)
        except _NeedsMorePrecision:
            dps *= 2
    raise PrecisionExhausted(
        f"sfpd_pmf: cancellation at k={k} not resolved after four precision "
        f"doublings (alpha_s={p.alpha_s}, nu={p.nu}, lambda={p.lam})"
    )


def sfpd_pmf_table(p: SfpdParams, k_max: Optional[int] = None,
                   mass_tol: Optional[float] = None,
                   ctl: SeriesControl = DEFAULT_CONTROL,
                   precision_digits: int = 15) -> PmfTable:
    """Table over a fixed k range (k_max) or an adaptive one (mass_tol)."""
    if (k_max is None) == (mass_tol is None):
        raise InvalidParams("sfpd_pmf_table: give exactly one of k_max, mass_tol")
    probs: list[float] = []
    cum = 0.0
    if k_max is not None:
        if not isinstance(k_max, int) or k_max < 0:
            raise InvalidParams(f"sfpd_pmf_table: k_max must be >= 0, got {k_max!r}")
        for k in range(k_max + 1):
            pk = sfpd_pmf(p, k, ctl, precision_digits)
            probs.append(pk)
            cum += pk
        return PmfTable(p, k_max, tuple(probs), max(0.0, 1.0 - cum))
    if not (0.0 < mass_tol < 1e-3):
        raise InvalidParams(f"sfpd_pmf_table: mass_tol must be in (0, 1e-3), got {mass_tol}")
    k = 0
    while True:
        if k > 1000:
            raise NonConvergence(
                f"sfpd_pmf_table: mass did not accumulate to 1 - {mass_tol} within 1000 terms"
            )
        pk = sfpd_pmf(p, k, ctl, precision_digits)
        probs.append(pk)
        cum += pk
        if cum >= 1.0 - mass_tol and pk < mass_tol / 10.0:
            break
        k += 1
    return PmfTable(p, k, tuple(probs), max(0.0, 1.0 - cum))


def sfpd_mean_variance(p: SfpdParams) -> tuple[float, float]:
    """Closed forms: mu = nu lambda^a / Gamma(1+a) and
    variance = mu + mu^2 [sqrt(pi) Gamma(1+a) / (2^(2a-1) Gamma(1/2+a)) - 1].

    At a = 1 the bracket collapses to 1 by the Legendre duplication formula
    and the classical mu = variance is recovered.
    """
    a = p.alpha_s
    mean = p.nu * p.lam**a / math.gamma(1.0 + a)
    bracket = (math.sqrt(math.pi) * math.gamma(1.0 + a)
               / (2.0 ** (2.0 * a - 1.0) * math.gamma(0.5 + a)))
    return mean, mean + mean * mean * (bracket - 1.0)

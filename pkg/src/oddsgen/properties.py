"""Distributional properties of the T2GWG family by numerical quadrature.

Moments, incomplete and conditional moments, the moment generating and
characteristic functions, Renyi and Shannon entropies are all integrals of
the form ``int g(x) f(x) dx``.  They are evaluated with adaptive
quadrature on segments cut at family quantiles, so each piece carries a
comparable share of the mass.  Before integrating, cheap tail probes check
that the integral exists; a divergent request raises
:class:`~oddsgen.errors.IntegrationError` rather than returning a number.

The module also carries two closed-form style checks: the order-statistic
density in direct and mixture form, and a truncated double-series expansion
of the density.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gammaln, gammasgn

from .baselines import BaselineSpec, get_baseline
from .errors import DomainError, IntegrationError
from .family import (
    ParamVector,
    _cache,
    _logpdf_from_cache,
    as_params,
    t2gwg_logcdf,
    t2gwg_logpdf,
    t2gwg_logsf,
    t2gwg_quantile,
)

__all__ = [
    "QuadratureConfig",
    "MomentSummary",
    "SeriesExpansion",
    "SeriesValue",
    "moment_raw",
    "moment_summary",
    "incomplete_moment",
    "conditional_moment",
    "mgf",
    "char_fn",
    "renyi_entropy",
    "shannon_entropy",
    "order_statistic_pdf",
    "order_statistic_pdf_mixture",
    "series_expansion",
    "pdf_series_truncated",
    "lr_ordering_check",
    "cdf_dominance_check",
    "tail_power_exponent",
    "tail_exponential_rate",
    "upper_edge_exponent",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances handed to :func:`scipy.integrate.quad` on every segment."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if int(self.max_subdivisions) < 1:
            raise DomainError("max_subdivisions must be positive")


_DEFAULT_QUAD = QuadratureConfig()

# family probabilities used as segment cut points
_CUTS = (1e-12, 1e-6, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.95, 0.999, 1 - 1e-6, 1 - 1e-10)


def _setup(params, baseline):
    baseline = get_baseline(baseline)
    theta = as_params(params).validate(baseline)
    return theta, baseline


def _logf_scalar(theta: ParamVector, baseline: BaselineSpec) -> Callable[[float], float]:
    def logf(x: float) -> float:
        c = _cache(theta, baseline, np.array([x]))
        return float(_logpdf_from_cache(theta, c)[0])

    return logf


def _segments(theta, baseline, a: float, b: float) -> list[tuple[float, float]]:
    cuts = np.asarray(t2gwg_quantile(theta, baseline, list(_CUTS)), dtype=float)
    pts = np.unique(np.r_[a, cuts[(cuts > a) & (cuts < b)], b])
    return list(zip(pts[:-1], pts[1:]))


def _integrate(weighted: Callable[[float], float], theta, baseline, a=None, b=None, quad=None, fourier=None) -> float:
    """``int_a^b weighted(x) dx`` over pieces of the support.

    A finite right end is approached through ``x = b - w s^2`` so that an
    integrable power singularity there does not stall the integrator.
    ``fourier = (kind, t, g)`` with ``weighted(x) = kind(t x) g(x)`` hands an
    infinite piece to the Fourier-weighted integrator instead.
    """
    quad = quad or _DEFAULT_QUAD
    lo, hi = baseline.support(theta.psi)
    a = lo if a is None else max(float(a), lo)
    b = hi if b is None else min(float(b), hi)
    if not a < b:
        return 0.0
    segs = _segments(theta, baseline, a, b)
    total = 0.0
    err_total = 0.0
    scale = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for j, (s0, s1) in enumerate(segs):
            last = j == len(segs) - 1
            if last and math.isfinite(s1) and s1 == hi:
                w = s1 - s0

                def fn(s, s1=s1, w=w):
                    return weighted(s1 - w * s * s) * 2.0 * w * s

                lims = (0.0, 1.0)
            else:
                fn, lims = weighted, (s0, s1)
            if fourier is not None and math.isinf(s1) and fourier[1] != 0:
                kind, t, g = fourier
                sign = -1.0 if (kind == "sin" and t < 0) else 1.0
                out = integrate.quad(
                    g, s0, math.inf, weight=kind, wvar=abs(t), epsabs=quad.abs_tol,
                    limlst=100, limit=int(quad.max_subdivisions), full_output=1,
                )
                out = (sign * out[0],) + tuple(out[1:])
            else:
                out = integrate.quad(
                    fn, *lims, epsabs=quad.abs_tol, epsrel=quad.rel_tol,
                    limit=int(quad.max_subdivisions), full_output=1,
                )
            val, err = out[0], out[1]
            if not math.isfinite(val):
                raise IntegrationError(f"non-finite integral on [{s0}, {s1}]")
            total += val
            err_total += err
            scale += abs(val)
    # judged on the whole integral: far-tail pieces carry almost no mass
    if err_total > 1e-6 * scale + 1e3 * quad.abs_tol:
        raise IntegrationError(f"quadrature error estimate {err_total:.3g} too large for integral {total:.6g}")
    return total


# ---- tail probes ----------------------------------------------------------

def tail_power_exponent(params, baseline) -> float:
    """Log-log slope ``s`` of the survival function, ``S(x) ~ x**-s``.

    Measured over the decade above the ``1 - 1e-6`` quantile; ``inf`` for a
    bounded support or a tail lighter than any power.
    """
    theta, baseline = _setup(params, baseline)
    if math.isfinite(baseline.support(theta.psi)[1]):
        return math.inf
    x1 = float(t2gwg_quantile(theta, baseline, 1 - 1e-6))
    x2 = 10.0 * x1
    drop = float(t2gwg_logsf(theta, baseline, x1) - t2gwg_logsf(theta, baseline, x2))
    return drop / math.log(10.0) if math.isfinite(drop) else math.inf


def tail_exponential_rate(params, baseline) -> float:
    """Limiting rate ``c`` with ``S(x) ~ exp(-c x)``.

    Two secant rates of ``-log S`` are compared far out in the tail; if the
    later one has dropped markedly the tail is heavier than exponential and
    the rate is reported as ``0``.  ``inf`` for a bounded support.
    """
    theta, baseline = _setup(params, baseline)
    if math.isfinite(baseline.support(theta.psi)[1]):
        return math.inf
    x = np.asarray(t2gwg_quantile(theta, baseline, [1 - 1e-4, 1 - 1e-8, 1 - 1e-12]), dtype=float)
    ls = np.asarray(t2gwg_logsf(theta, baseline, x), dtype=float)
    early = (ls[0] - ls[1]) / (x[1] - x[0])
    late = (ls[1] - ls[2]) / (x[2] - x[1])
    if not (math.isfinite(late) and late > 0) or late < 0.9 * early:
        return 0.0
    return float(late)


def upper_edge_exponent(params, baseline) -> float:
    """Exponent ``e`` with ``f(x) ~ (b - x)**e`` at a finite right end ``b``.

    ``nan`` when the support is unbounded above.
    """
    theta, baseline = _setup(params, baseline)
    b = baseline.support(theta.psi)[1]
    if not math.isfinite(b):
        return math.nan
    d1, d2 = 1e-6 * b, 1e-8 * b
    l1 = float(t2gwg_logpdf(theta, baseline, b - d1))
    l2 = float(t2gwg_logpdf(theta, baseline, b - d2))
    return (l1 - l2) / math.log(d1 / d2)


def _require_power_moment(theta, baseline, r: float) -> None:
    s = tail_power_exponent(theta, baseline)
    if r >= s * (1 - 1e-6):
        raise IntegrationError(f"moment of order {r} diverges: survival decays like x^-{s:.6g}")


# ---- moments ---------------------------------------------------------------

def moment_raw(params, baseline, r: float, quad: QuadratureConfig | None = None) -> float:
    """Raw moment ``E[X**r]``; ``r = 0`` integrates the density itself."""
    theta, baseline = _setup(params, baseline)
    if r < 0:
        raise DomainError("moment order must be nonnegative")
    if r > 0:
        _require_power_moment(theta, baseline, r)
    logf = _logf_scalar(theta, baseline)

    def g(x):
        lf = logf(x)
        if lf == -math.inf:
            return 0.0
        return math.exp(lf) if r == 0 else math.exp(r * math.log(x) + lf)

    return _integrate(g, theta, baseline, quad=quad)


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    variance: float
    skewness: float
    kurtosis: float


def moment_summary(params, baseline, quad: QuadratureConfig | None = None) -> MomentSummary:
    """Mean, variance, skewness and (non-excess) kurtosis.

    Central moments are integrated directly around the mean rather than
    assembled from raw moments, which would cancel badly.
    """
    theta, baseline = _setup(params, baseline)
    _require_power_moment(theta, baseline, 4)
    mu = moment_raw(theta, baseline, 1, quad)
    logf = _logf_scalar(theta, baseline)

    def central(k):
        def g(x):
            lf = logf(x)
            return 0.0 if lf == -math.inf else (x - mu) ** k * math.exp(lf)

        return _integrate(g, theta, baseline, quad=quad)

    m2, m3, m4 = central(2), central(3), central(4)
    return MomentSummary(mu, m2, m3 / m2**1.5, m4 / m2**2)


def incomplete_moment(params, baseline, s: float, z: float, quad: QuadratureConfig | None = None) -> float:
    """``int_lower^z y**s f(y) dy``."""
    theta, baseline = _setup(params, baseline)
    baseline.check_support(z, theta.psi)
    if s > 0 and math.isinf(z):
        _require_power_moment(theta, baseline, s)
    logf = _logf_scalar(theta, baseline)

    def g(x):
        lf = logf(x)
        return 0.0 if lf == -math.inf else math.exp(s * math.log(x) + lf) if s else math.exp(lf)

    return _integrate(g, theta, baseline, b=z, quad=quad)


def conditional_moment(params, baseline, r: float, a: float, quad: QuadratureConfig | None = None) -> float:
    """``E[Y**r | Y >= a]``.

    The upper integral is taken directly and divided by ``1 - F(a)``; this
    equals ``(E[Y**r] - incomplete_moment(r, a)) / (1 - F(a))`` without the
    subtraction.
    """
    theta, baseline = _setup(params, baseline)
    baseline.check_support(a, theta.psi)
    if r > 0:
        _require_power_moment(theta, baseline, r)
    log_surv = float(t2gwg_logsf(theta, baseline, a))
    if log_surv < math.log(1e-300):
        raise DomainError(f"survival at a={a} is below 1e-300")
    logf = _logf_scalar(theta, baseline)

    def g(x):
        lf = logf(x)
        return 0.0 if lf == -math.inf else math.exp(r * math.log(x) + lf - log_surv)

    return _integrate(g, theta, baseline, a=a, quad=quad)


def mgf(params, baseline, t: float, quad: QuadratureConfig | None = None) -> float:
    """``E[exp(t X)]``; divergent for ``t`` at or beyond the tail rate."""
    theta, baseline = _setup(params, baseline)
    if t > 0:
        rate = tail_exponential_rate(theta, baseline)
        if t >= rate * (1 - 1e-6):
            raise IntegrationError(f"mgf diverges at t={t}: tail rate is {rate:.6g}")
    logf = _logf_scalar(theta, baseline)

    def g(x):
        lf = logf(x)
        return 0.0 if lf == -math.inf else math.exp(t * x + lf)

    return _integrate(g, theta, baseline, quad=quad)


def char_fn(params, baseline, t: float, quad: QuadratureConfig | None = None) -> tuple[float, float]:
    """``E[exp(i t X)]`` as ``(real, imaginary)``."""
    theta, baseline = _setup(params, baseline)
    logf = _logf_scalar(theta, baseline)

    def dens(x):
        lf = logf(x)
        return 0.0 if lf == -math.inf else math.exp(lf)

    def part(trig, kind):
        def g(x):
            return trig(t * x) * dens(x)

        return _integrate(g, theta, baseline, quad=quad, fourier=(kind, t, dens))

    return part(math.cos, "cos"), part(math.sin, "sin")


# ---- entropy ---------------------------------------------------------------

def _require_power_integrable(theta, baseline, omega: float) -> None:
    e = upper_edge_exponent(theta, baseline)
    if math.isfinite(e) and omega * e <= -1 + 1e-9:
        raise IntegrationError(f"int f^{omega} diverges at the upper support end (f ~ (b-x)^{e:.6g})")
    s = tail_power_exponent(theta, baseline)
    if math.isfinite(s) and omega * (s + 1.0) <= 1 + 1e-9:
        raise IntegrationError(f"int f^{omega} diverges in the upper tail (f ~ x^-{s + 1:.6g})")


def renyi_entropy(params, baseline, omega: float, quad: QuadratureConfig | None = None) -> float:
    """``log(int f**omega dx) / (1 - omega)`` for ``omega > 0, omega != 1``."""
    if not omega > 0 or omega == 1:
        raise DomainError("Renyi order must be positive and different from 1")
    theta, baseline = _setup(params, baseline)
    _require_power_integrable(theta, baseline, omega)
    logf = _logf_scalar(theta, baseline)

    def g(x):
        lf = logf(x)
        return 0.0 if lf == -math.inf else math.exp(omega * lf)

    return math.log(_integrate(g, theta, baseline, quad=quad)) / (1.0 - omega)


def shannon_entropy(params, baseline, quad: QuadratureConfig | None = None) -> float:
    """``-int f log f dx``."""
    theta, baseline = _setup(params, baseline)
    logf = _logf_scalar(theta, baseline)

    def g(x):
        lf = logf(x)
        return 0.0 if lf == -math.inf else -lf * math.exp(lf)

    return _integrate(g, theta, baseline, quad=quad)


# ---- order statistics ------------------------------------------------------

def _check_order(i: int, n: int) -> None:
    if not (int(i) == i and int(n) == n and 1 <= i <= n):
        raise DomainError(f"order statistic needs integers 1 <= i <= n, got i={i}, n={n}")


def _log_norm(i: int, n: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(i) - math.lgamma(n - i + 1)


def order_statistic_pdf(params, baseline, i: int, n: int, x):
    """Density of the ``i``-th of ``n`` order statistics, in log space."""
    _check_order(i, n)
    theta, baseline = _setup(params, baseline)
    lf = np.asarray(t2gwg_logpdf(theta, baseline, x), dtype=float)
    lF = np.asarray(t2gwg_logcdf(theta, baseline, x), dtype=float)
    lS = np.asarray(t2gwg_logsf(theta, baseline, x), dtype=float)
    with np.errstate(invalid="ignore"):
        logv = _log_norm(i, n) + lf + (i - 1) * np.where(i == 1, 0.0, lF) + (n - i) * np.where(i == n, 0.0, lS)
    out = np.exp(np.where(np.isnan(logv), -np.inf, logv))
    return out[()] if np.ndim(x) == 0 else out


def order_statistic_pdf_mixture(params, baseline, i: int, n: int, x):
    """The same density as a signed mixture of T2GWG densities.

    ``n!/((i-1)!(n-i)!) * sum_m C(n-i, m) (-1)^m / (i+m) * f(x; (i+m) alpha, beta)``.
    The alternating sum cancels heavily where ``F`` is close to 1.
    """
    _check_order(i, n)
    theta, baseline = _setup(params, baseline)
    norm = math.exp(_log_norm(i, n))
    total = np.zeros(np.shape(x), dtype=float)
    for m in range(n - i + 1):
        scaled = ParamVector((i + m) * theta.alpha, theta.beta, theta.psi)
        coef = math.comb(n - i, m) * (-1) ** m / (i + m)
        total = total + coef * np.exp(np.asarray(t2gwg_logpdf(scaled, baseline, x), dtype=float))
    out = norm * total
    return out[()] if np.ndim(x) == 0 else out


# ---- series expansion ------------------------------------------------------

@dataclass(frozen=True)
class SeriesExpansion:
    """Coefficients of the double series ``f = sum c_jk * r_jk``.

    ``r_jk = b* h H**(b* - 1)`` with ``b* = k - beta (j + 1)`` is an
    exponentiated-generalized density.  ``terms`` holds
    ``(j, k, c_jk, b*)``; terms with ``|b*| < 1e-8`` are left out and
    counted in ``excluded``.  Their contribution ``c_jk * b*`` is a
    binomial coefficient with a pole in the denominator, so it is zero.
    """

    terms: tuple[tuple[int, int, float, float], ...]
    j_max: int
    k_max: int
    excluded: int


def _log_abs_binom(a: float, k: int) -> tuple[float, float]:
    """``(log|C(a, k)|, sign)`` for real ``a``; sign 0 when the value is 0."""
    if a - k + 1 <= 0 and float(a - k + 1).is_integer():
        return -math.inf, 0.0
    log_abs = float(gammaln(a + 1) - gammaln(k + 1) - gammaln(a - k + 1))
    sign = float(gammasgn(a + 1) * gammasgn(a - k + 1))
    return log_abs, sign


def series_expansion(params, j_max: int, k_max: int) -> SeriesExpansion:
    theta = as_params(params)
    a, b = theta.alpha, theta.beta
    terms = []
    excluded = 0
    for j in range(j_max + 1):
        top = b * (j + 1) - 1.0
        for k in range(k_max + 1):
            b_star = k - b * (j + 1)
            if abs(b_star) < 1e-8:
                excluded += 1
                continue
            log_c, sgn = _log_abs_binom(top, k)
            if sgn == 0:
                c = 0.0
            else:
                log_abs = math.log(a * b) + j * math.log(a) - math.lgamma(j + 1) + log_c - math.log(abs(b_star))
                c = (-1) ** (j + k) * sgn * math.copysign(1.0, b_star) * math.exp(log_abs)
            terms.append((j, k, c, b_star))
    return SeriesExpansion(tuple(terms), j_max, k_max, excluded)


@dataclass(frozen=True)
class SeriesValue:
    value: float
    excluded: int
    diverged: bool


def pdf_series_truncated(params, baseline, x: float, j_max: int, k_max: int) -> SeriesValue:
    """Partial sum of the double series for the density at ``x``.

    ``diverged`` is set when some partial sum (over ``j``) strays beyond
    1000 times the directly computed density.
    """
    theta, baseline = _setup(params, baseline)
    xa = baseline.check_support(float(x), theta.psi)
    log_h, log_H, _ = (float(v) for v in baseline.log_parts(xa, theta.psi))
    if not math.isfinite(log_H):
        raise DomainError("series needs an interior point")
    ser = series_expansion(theta, j_max, k_max)
    direct = math.exp(float(t2gwg_logpdf(theta, baseline, xa)))
    total = 0.0
    worst = 0.0
    current_j = 0
    for j, _, c, b_star in ser.terms:
        if j != current_j:
            worst = max(worst, abs(total))
            current_j = j
        if c == 0.0:
            continue
        total += c * b_star * math.exp(log_h + (b_star - 1.0) * log_H)
    worst = max(worst, abs(total))
    return SeriesValue(total, ser.excluded, worst > 1e3 * direct)


# ---- stochastic ordering ---------------------------------------------------

def _default_psi(baseline: BaselineSpec, psi):
    return tuple(psi) if psi is not None else (1.0,) * baseline.param_count


def lr_ordering_check(alpha1: float, alpha2: float, beta: float, baseline, grid: Sequence[float], psi=None) -> bool:
    """True iff ``f_alpha1 / f_alpha2`` is strictly decreasing on ``grid``.

    The ratio is ``(alpha1/alpha2) exp((alpha2 - alpha1) (H/Hbar)**-beta)``;
    only the exponent varies with ``x``, so its differences are checked.
    """
    baseline = get_baseline(baseline)
    psi = _default_psi(baseline, psi)
    theta = ParamVector(alpha1, beta, psi).validate(baseline)
    ParamVector(alpha2, beta, psi)
    x = baseline.check_support(np.asarray(grid, dtype=float), psi)
    c = _cache(theta, baseline, x)
    exponent = (alpha2 - alpha1) * np.exp(-beta * c.log_odds)
    return bool(np.all(np.diff(exponent) < 0))


def cdf_dominance_check(alpha1: float, alpha2: float, beta: float, baseline, grid: Sequence[float], psi=None) -> bool:
    """True iff ``F_alpha2(x) <= F_alpha1(x)`` at every grid point."""
    baseline = get_baseline(baseline)
    psi = _default_psi(baseline, psi)
    x = baseline.check_support(np.asarray(grid, dtype=float), psi)
    f1 = np.asarray(t2gwg_logcdf(ParamVector(alpha1, beta, psi), baseline, x))
    f2 = np.asarray(t2gwg_logcdf(ParamVector(alpha2, beta, psi), baseline, x))
    return bool(np.all(f2 <= f1))

"""The exponentiated-odds-ratio generator and the Type-2 Gumbel Weibull-G family.

The generator maps a baseline cdf ``H`` through an outer cdf ``R``::

    F(x) = R(alpha * (H(x) / Hbar(x)) ** beta)

With the Type-2 Gumbel outer, reduced to two parameters, this becomes::

    F(x) = exp(-alpha * (H(x) / Hbar(x)) ** -beta)

Everything is evaluated from ``log H`` and ``log Hbar`` so that the odds
power never overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .baselines import BaselineSpec, get_baseline
from .errors import DomainError

__all__ = [
    "ParamVector",
    "OuterSpec",
    "LogOddsCache",
    "weibull_outer",
    "exponential_outer",
    "type2_gumbel_outer",
    "uniform_outer",
    "compose_cdf",
    "log_odds_cache",
    "t2gwg_cdf",
    "t2gwg_logcdf",
    "t2gwg_sf",
    "t2gwg_logsf",
    "t2gwg_logpdf",
    "t2gwg_pdf",
    "t2gwg_hazard",
    "t2gwg_reverse_hazard",
    "t2gwg_quantile",
    "t2gwg_sample",
    "log1mexp",
]


def _scalar_out(x_in, out):
    return out[()] if np.ndim(x_in) == 0 else out


def log1mexp(a):
    """``log(1 - exp(-a))`` for ``a >= 0``, accurate at both ends."""
    a = np.asarray(a, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(a < math.log(2.0), np.log(-np.expm1(-a)), np.log1p(-np.exp(-a)))


@dataclass(frozen=True)
class ParamVector:
    """Family parameters ``(alpha, beta)`` plus the baseline block ``psi``."""

    alpha: float
    beta: float
    psi: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "psi", tuple(float(v) for v in np.atleast_1d(self.psi)))
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name}={v} must be positive and finite")

    @classmethod
    def from_array(cls, theta: Sequence[float]) -> "ParamVector":
        theta = np.asarray(theta, dtype=float)
        return cls(theta[0], theta[1], tuple(theta[2:]))

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, *self.psi])

    def validate(self, baseline: BaselineSpec) -> "ParamVector":
        baseline.validate_psi(self.psi)
        return self

    def names(self, baseline: BaselineSpec) -> tuple[str, ...]:
        return ("alpha", "beta", *baseline.param_names)


def as_params(params) -> ParamVector:
    if isinstance(params, ParamVector):
        return params
    return ParamVector.from_array(params)


# ---------------------------------------------------------------------------
# Outer distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OuterSpec:
    """Outer cdf ``R(t)`` on ``[0, inf)``.

    ``cdf_of_log_t`` receives ``log t`` and is what :func:`compose_cdf`
    calls; presets implement it directly to stay finite at the support ends.
    ``improper`` marks presets whose ``R`` is clamped (e.g. a uniform outer
    that is only a cdf on ``[0, theta]``).
    """

    name: str
    cdf_of_log_t: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)
    improper: bool = False

    @classmethod
    def from_cdf(cls, name: str, cdf: Callable[[np.ndarray], np.ndarray], **params) -> "OuterSpec":
        """Wrap an arbitrary cdf on ``[0, inf)`` given as a function of ``t``."""

        def of_log_t(log_t):
            with np.errstate(over="ignore"):
                return cdf(np.exp(log_t))

        return cls(name, of_log_t, params)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return self.cdf_of_log_t(np.log(t))


def weibull_outer(shape: float = 1.0, scale: float = 1.0) -> OuterSpec:
    """``R(t) = 1 - exp(-(t/scale)**shape)``; gives the Weibull-G family."""
    if shape <= 0 or scale <= 0:
        raise DomainError("Weibull outer needs positive shape and scale")
    ls = math.log(scale)

    def of_log_t(log_t):
        with np.errstate(over="ignore"):
            return -np.expm1(-np.exp(shape * (log_t - ls)))

    return OuterSpec("weibull", of_log_t, {"shape": shape, "scale": scale})


def exponential_outer(rate: float = 1.0) -> OuterSpec:
    spec = weibull_outer(1.0, 1.0 / rate)
    return OuterSpec("exponential", spec.cdf_of_log_t, {"rate": rate})


def type2_gumbel_outer(lam: float = 1.0, delta: float = 1.0) -> OuterSpec:
    """``R(t) = exp(-lam * t**-delta)``."""
    if lam <= 0 or delta <= 0:
        raise DomainError("Type-2 Gumbel outer needs positive lam and delta")
    ll = math.log(lam)

    def of_log_t(log_t):
        with np.errstate(over="ignore"):
            return np.exp(-np.exp(ll - delta * log_t))

    return OuterSpec("type2_gumbel", of_log_t, {"lam": lam, "delta": delta})


def uniform_outer(theta: float = 1.0) -> OuterSpec:
    """``R(t) = t/theta`` clamped at 1 (improper beyond ``theta``)."""
    if theta <= 0:
        raise DomainError("uniform outer needs positive theta")
    lt = math.log(theta)

    def of_log_t(log_t):
        with np.errstate(over="ignore"):
            return np.minimum(np.exp(log_t - lt), 1.0)

    return OuterSpec("uniform", of_log_t, {"theta": theta}, improper=True)


def _check_ab(alpha: float, beta: float) -> None:
    if not (math.isfinite(alpha) and alpha > 0 and math.isfinite(beta) and beta > 0):
        raise DomainError(f"alpha={alpha}, beta={beta} must be positive and finite")


def compose_cdf(outer: OuterSpec, baseline: BaselineSpec | str, alpha: float, beta: float, x, psi):
    """General generator ``R(alpha * [H/Hbar]**beta)`` evaluated in log space."""
    baseline = get_baseline(baseline)
    _check_ab(alpha, beta)
    xa = baseline.check_support(x, psi)
    _, log_H, log_hbar = baseline.log_parts(xa, psi)
    with np.errstate(invalid="ignore"):
        log_t = math.log(alpha) + beta * (log_H - log_hbar)
    return _scalar_out(x, np.asarray(outer.cdf_of_log_t(log_t), dtype=float))


# ---------------------------------------------------------------------------
# T2GWG family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogOddsCache:
    """Log-space pieces shared by the T2GWG functions at a set of points."""

    log_h: np.ndarray
    log_H: np.ndarray
    log_Hbar: np.ndarray
    log_odds: np.ndarray
    log_A: np.ndarray

    @property
    def A(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_A)


def _cache(theta: ParamVector, baseline: BaselineSpec, x: np.ndarray) -> LogOddsCache:
    log_h, log_H, log_hbar = baseline.log_parts(x, theta.psi)
    with np.errstate(invalid="ignore"):
        log_odds = log_H - log_hbar
        log_A = math.log(theta.alpha) - theta.beta * log_odds
    return LogOddsCache(log_h, log_H, log_hbar, log_odds, log_A)


def log_odds_cache(params, baseline: BaselineSpec | str, x) -> LogOddsCache:
    """Public constructor for :class:`LogOddsCache` with domain checks."""
    baseline = get_baseline(baseline)
    theta = as_params(params).validate(baseline)
    return _cache(theta, baseline, baseline.check_support(np.atleast_1d(x), theta.psi))


def _prepare(params, baseline, x):
    baseline = get_baseline(baseline)
    theta = as_params(params).validate(baseline)
    xa = baseline.check_support(x, theta.psi)
    return theta, baseline, xa, _cache(theta, baseline, xa)


def t2gwg_logcdf(params, baseline, x):
    """``log F = -A``."""
    _, _, _, c = _prepare(params, baseline, x)
    return _scalar_out(x, -c.A)


def t2gwg_cdf(params, baseline, x):
    """``F(x) = exp(-alpha * (H/Hbar)**-beta)``; exact 0/1 at the support ends."""
    _, _, _, c = _prepare(params, baseline, x)
    return _scalar_out(x, np.exp(-c.A))


def _logsf_from_cache(c: LogOddsCache) -> np.ndarray:
    A = c.A
    with np.errstate(divide="ignore", invalid="ignore"):
        small = c.log_A < -18.0
        # log(1 - e^-A) = log A - A/2 + O(A^2) once A is below ~1.5e-8
        out = np.where(small, c.log_A - 0.5 * np.exp(np.minimum(c.log_A, 0.0)), log1mexp(A))
    return out


def t2gwg_logsf(params, baseline, x):
    _, _, _, c = _prepare(params, baseline, x)
    return _scalar_out(x, _logsf_from_cache(c))


def t2gwg_sf(params, baseline, x):
    return np.exp(t2gwg_logsf(params, baseline, x))


def _logpdf_from_cache(theta: ParamVector, c: LogOddsCache) -> np.ndarray:
    interior = np.isfinite(c.log_odds)
    a, b = theta.alpha, theta.beta
    with np.errstate(invalid="ignore", over="ignore"):
        val = (
            math.log(a)
            + math.log(b)
            + c.log_h
            - (b + 1.0) * c.log_H
            + (b - 1.0) * c.log_Hbar
            - c.A
        )
    val = np.where(interior, val, -np.inf)
    return np.where(np.isnan(val), -np.inf, val)


def t2gwg_logpdf(params, baseline, x):
    """Log density; ``-inf`` at the support boundaries."""
    theta, _, _, c = _prepare(params, baseline, x)
    return _scalar_out(x, _logpdf_from_cache(theta, c))


def t2gwg_pdf(params, baseline, x):
    return np.exp(t2gwg_logpdf(params, baseline, x))


def t2gwg_hazard(params, baseline, x):
    """``f / (1 - F)``; ``+inf`` where the survival function vanishes."""
    theta, _, _, c = _prepare(params, baseline, x)
    lpdf = _logpdf_from_cache(theta, c)
    lsf = _logsf_from_cache(c)
    with np.errstate(invalid="ignore", over="ignore"):
        out = np.exp(lpdf - lsf)
    out = np.where(np.isneginf(lsf), np.inf, out)
    return _scalar_out(x, out)


def t2gwg_reverse_hazard(params, baseline, x):
    """``f / F = alpha * beta * h * H**(-beta-1) * Hbar**(beta-1)``."""
    theta, _, _, c = _prepare(params, baseline, x)
    a, b = theta.alpha, theta.beta
    with np.errstate(invalid="ignore", over="ignore"):
        log_tau = math.log(a) + math.log(b) + c.log_h - (b + 1.0) * c.log_H + (b - 1.0) * c.log_Hbar
        out = np.exp(log_tau)
    # boundary sentinel mirrors the density's
    out = np.where(np.isfinite(c.log_odds), out, 0.0)
    return _scalar_out(x, out)


def t2gwg_quantile(params, baseline, p):
    """Quantile function.

    Solves ``H(x) = 1 / ((-log p / alpha)**(1/beta) + 1)`` in odds form so
    no precision is lost near ``p = 1``.
    """
    baseline = get_baseline(baseline)
    theta = as_params(params).validate(baseline)
    pa = np.asarray(p, dtype=float)
    if np.any(np.isnan(pa)) or np.any((pa < 0) | (pa > 1)):
        raise DomainError("quantile requires p in [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        log_odds = (math.log(theta.alpha) - np.log(-np.log(pa))) / theta.beta
        out = np.asarray(baseline.from_log_odds(log_odds, theta.psi), dtype=float)
    lo, hi = baseline.support(theta.psi)
    out = np.where(pa == 0, lo, np.where(pa == 1, hi, out))
    return _scalar_out(p, out)


def t2gwg_sample(params, baseline, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` values by inverse transform from a stream seeded by ``seed``."""
    if int(n) < 1:
        raise DomainError("n must be at least 1")
    rng = np.random.default_rng(int(seed))
    return t2gwg_quantile(params, baseline, rng.random(int(n)))

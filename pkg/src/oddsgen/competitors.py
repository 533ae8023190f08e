"""Competitor lifetime models and a common model interface.

Five positive-support models are provided for comparison with the T2GWG
family, each with ``log`` cdf, survival and density written to stay
accurate in both tails:

=====  ====================================  ==========================
name   cdf                                   parameters
=====  ====================================  ==========================
EGT    ``1 - (1 - exp(-theta x^-phi))^a``    ``(alpha, phi, theta)``
WGE    ``1 - exp(-a (exp(lam x) - 1)^b)``    ``(a, b, lam)``
LGT    ``1 - (1 - log(1-exp(-theta x^-k))/beta)^-alpha``
                                             ``(alpha, beta, theta, k)``
T2G    ``exp(-theta x^-phi)``                ``(phi, theta)``
EWL    ``(1 - exp(-alpha exp(lam beta x)))^theta``
                                             ``(lam, alpha, beta, theta)``
=====  ====================================  ==========================

:func:`get_model` also wraps the T2GWG family behind the same interface so
that goodness-of-fit code does not need to know which kind of model it
was handed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .baselines import BaselineSpec, get_baseline
from .errors import ConfigError, DataError, DomainError
from .estimation import Dataset, FitConfig, FitResult, minimize_multistart, standard_errors
from .family import (
    ParamVector,
    as_params,
    log1mexp,
    t2gwg_logcdf,
    t2gwg_logpdf,
    t2gwg_logsf,
    t2gwg_quantile,
)

__all__ = [
    "CompetitorSpec",
    "FamilyModel",
    "COMPETITORS",
    "FAMILY_MODELS",
    "get_competitor",
    "get_model",
    "competitor_fit",
    "fd_gradient",
    "fd_hessian",
    "model_params",
]

ArrayFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _log1mexp_neg(v):
    """``log(1 - exp(-v))`` for ``v >= 0``."""
    return log1mexp(v)


def _log_expm1(t):
    """``log(exp(t) - 1)`` for ``t > 0`` without overflow."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(t > 30.0, t + np.log1p(-np.exp(-t)), np.log(np.expm1(np.minimum(t, 30.0))))


def _complement(log_p):
    """``log(1 - exp(log_p))`` for ``log_p <= 0``."""
    return log1mexp(-np.asarray(log_p, dtype=float))


# ---- EGT --------------------------------------------------------------------

def _egt_parts(x, p):
    a, phi, theta = p
    z = theta * np.exp(-phi * np.log(x))
    return a, phi, theta, z, _log1mexp_neg(z)


def _egt_logsf(x, p):
    a, _, _, _, l1 = _egt_parts(x, p)
    return a * l1


def _egt_logcdf(x, p):
    return _complement(_egt_logsf(x, p))


def _egt_logpdf(x, p):
    a, phi, theta, z, l1 = _egt_parts(x, p)
    return math.log(a * phi * theta) - (phi + 1.0) * np.log(x) - z + (a - 1.0) * l1


def _egt_quantile(q, p):
    a, phi, theta = p
    # 1 - exp(-z) = (1-q)^(1/a)
    z = -log1mexp(-np.log1p(-q) / a)
    return (z / theta) ** (-1.0 / phi)


# ---- WGE --------------------------------------------------------------------

def _wge_log_s(x, p):
    a, b, lam = p
    return math.log(a) + b * _log_expm1(lam * x)


def _wge_logsf(x, p):
    return -np.exp(_wge_log_s(x, p))


def _wge_logcdf(x, p):
    return _log1mexp_neg(np.exp(_wge_log_s(x, p)))


def _wge_logpdf(x, p):
    a, b, lam = p
    lw = _log_expm1(lam * x)
    return math.log(a * b * lam) + lam * x + (b - 1.0) * lw - np.exp(math.log(a) + b * lw)


def _wge_quantile(q, p):
    a, b, lam = p
    return np.log1p((-np.log1p(-q) / a) ** (1.0 / b)) / lam


# ---- LGT --------------------------------------------------------------------

def _lgt_parts(x, p):
    alpha, beta, theta, k = p
    z = theta * np.exp(-k * np.log(x))
    return alpha, beta, theta, k, z, _log1mexp_neg(z)


def _lgt_logsf(x, p):
    alpha, beta, _, _, _, L = _lgt_parts(x, p)
    return -alpha * np.log1p(-L / beta)


def _lgt_logcdf(x, p):
    return _complement(_lgt_logsf(x, p))


def _lgt_logpdf(x, p):
    alpha, beta, theta, k, z, L = _lgt_parts(x, p)
    # alpha log beta - (alpha+1) log(beta - L), kept stable for large beta
    return (
        math.log(alpha * theta * k)
        - (k + 1.0) * np.log(x)
        - z
        - L
        - (alpha + 1.0) * np.log1p(-L / beta)
        - math.log(beta)
    )


def _lgt_quantile(q, p):
    alpha, beta, theta, k = p
    L = beta * (1.0 - np.exp(-np.log1p(-q) / alpha))
    z = -log1mexp(-L)
    return (z / theta) ** (-1.0 / k)


# ---- T2G --------------------------------------------------------------------

def _t2g_z(x, p):
    phi, theta = p
    return theta * np.exp(-phi * np.log(x))


def _t2g_logcdf(x, p):
    return -_t2g_z(x, p)


def _t2g_logsf(x, p):
    return _log1mexp_neg(_t2g_z(x, p))


def _t2g_logpdf(x, p):
    phi, theta = p
    return math.log(phi * theta) - (phi + 1.0) * np.log(x) - _t2g_z(x, p)


def _t2g_quantile(q, p):
    phi, theta = p
    return (-np.log(q) / theta) ** (-1.0 / phi)


# ---- EWL --------------------------------------------------------------------

def _ewl_v(x, p):
    lam, alpha, beta, _ = p
    return alpha * np.exp(lam * beta * x)


def _ewl_logcdf(x, p):
    return p[3] * _log1mexp_neg(_ewl_v(x, p))


def _ewl_logsf(x, p):
    return _complement(_ewl_logcdf(x, p))


def _ewl_logpdf(x, p):
    lam, alpha, beta, theta = p
    v = _ewl_v(x, p)
    return math.log(theta * lam * alpha * beta) + (theta - 1.0) * _log1mexp_neg(v) + lam * beta * x - v


def _ewl_quantile(q, p):
    lam, alpha, beta, theta = p
    # values below F(0) map to negative x; the model puts mass F(0) below 0
    return np.log(-np.log1p(-(q ** (1.0 / theta))) / alpha) / (lam * beta)


# ---- starting values ----------------------------------------------------------

def _plotting(x):
    n = x.size
    return np.arange(1, n + 1) / (n + 1.0)


def _t2g_start(x):
    # log(-log F) = log theta - phi log x
    pos = x[x > 0]
    y = np.log(-np.log(_plotting(x)[x > 0]))
    slope, icpt = np.polyfit(np.log(pos), y, 1)
    phi = max(-slope, 0.05)
    return phi, math.exp(icpt)


def _start_egt(x):
    phi, theta = _t2g_start(x)
    return (1.0, phi, theta)


def _start_wge(x):
    lam = 1.0 / max(float(np.mean(x)), 1e-12)
    # log(-log(1-F)) = log a + b log(exp(lam x) - 1)
    lw = _log_expm1(lam * x)
    y = np.log(-np.log1p(-_plotting(x)))
    b, log_a = np.polyfit(lw, y, 1)
    return (math.exp(log_a), max(b, 0.05), lam)


def _start_lgt(x):
    phi, theta = _t2g_start(x)
    return (1.0, 1.0, theta, phi)


def _start_t2g(x):
    return _t2g_start(x)


def _start_ewl(x):
    c = 1.0 / max(float(np.mean(x)), 1e-12)
    med = float(np.median(x))
    return (1.0, math.log(2.0) * math.exp(-c * med), c, 1.0)


# ---- specs ----------------------------------------------------------------------

@dataclass(frozen=True)
class CompetitorSpec:
    """A fixed-form lifetime model with strictly positive parameters.

    The ``log*`` callables take ``(x, params)`` with ``x`` a float array
    inside the support ``x > 0`` and ``params`` a validated tuple.
    """

    name: str
    title: str
    param_names: tuple[str, ...]
    _logcdf: ArrayFn
    _logsf: ArrayFn
    _logpdf: ArrayFn
    _quantile: ArrayFn
    _start: Callable[[np.ndarray], tuple[float, ...]]

    @property
    def param_count(self) -> int:
        return len(self.param_names)

    def bounds(self, x=None) -> list[tuple[float, float]]:
        return [(0.0, math.inf)] * self.param_count

    def validate(self, params) -> tuple[float, ...]:
        p = tuple(float(v) for v in np.asarray(params, dtype=float).ravel())
        if len(p) != self.param_count:
            raise DomainError(f"{self.name} takes {self.param_count} parameters, got {len(p)}")
        if not all(math.isfinite(v) and v > 0 for v in p):
            raise DomainError(f"{self.name} parameters must be positive and finite: {p}")
        return p

    def _eval(self, fn: ArrayFn, x, params, outside: float):
        p = self.validate(params)
        xa = np.asarray(x, dtype=float)
        if np.any(np.isnan(xa)):
            raise DomainError("x contains NaN")
        inside = xa > 0
        with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
            val = fn(np.where(inside, xa, 1.0), p)
        out = np.where(inside, val, outside)
        out = np.where(np.isnan(out), outside, out)
        return out[()] if np.ndim(x) == 0 else out

    def logcdf(self, x, params):
        return self._eval(self._logcdf, x, params, -np.inf)

    def logsf(self, x, params):
        return self._eval(self._logsf, x, params, 0.0)

    def logpdf(self, x, params):
        return self._eval(self._logpdf, x, params, -np.inf)

    def cdf(self, x, params):
        return np.exp(self.logcdf(x, params))

    def sf(self, x, params):
        return np.exp(self.logsf(x, params))

    def pdf(self, x, params):
        return np.exp(self.logpdf(x, params))

    def hazard(self, x, params):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(self.logpdf(x, params) - self.logsf(x, params))

    def quantile(self, q, params):
        p = self.validate(params)
        qa = np.asarray(q, dtype=float)
        if np.any((qa <= 0) | (qa >= 1) | np.isnan(qa)):
            raise DomainError("quantile probabilities must lie in (0, 1)")
        with np.errstate(divide="ignore", over="ignore"):
            out = np.asarray(self._quantile(qa, p), dtype=float)
        return out[()] if np.ndim(q) == 0 else out

    def sample(self, params, n: int, seed: int) -> np.ndarray:
        if int(n) < 1:
            raise DomainError("n must be at least 1")
        return self.quantile(np.random.default_rng(int(seed)).random(int(n)), params)

    def initial(self, x: np.ndarray) -> np.ndarray:
        try:
            start = np.asarray(self._start(np.sort(np.asarray(x, dtype=float))), dtype=float)
        except (ValueError, FloatingPointError, np.linalg.LinAlgError):
            start = np.ones(self.param_count)
        return np.where(np.isfinite(start) & (start > 0), start, 1.0)

    def neg_log_likelihood(self, params, data) -> float:
        try:
            val = -float(np.sum(self.logpdf(np.asarray(data, dtype=float), params)))
        except DomainError:
            return math.inf
        return val if math.isfinite(val) else math.inf


COMPETITORS: dict[str, CompetitorSpec] = {
    s.name: s
    for s in (
        CompetitorSpec("EGT", "exponentiated Gumbel type-2", ("alpha", "phi", "theta"),
                       _egt_logcdf, _egt_logsf, _egt_logpdf, _egt_quantile, _start_egt),
        CompetitorSpec("WGE", "Weibull generalized exponential", ("a", "b", "lam"),
                       _wge_logcdf, _wge_logsf, _wge_logpdf, _wge_quantile, _start_wge),
        CompetitorSpec("LGT", "Lomax Gumbel type-2", ("alpha", "beta", "theta", "k"),
                       _lgt_logcdf, _lgt_logsf, _lgt_logpdf, _lgt_quantile, _start_lgt),
        CompetitorSpec("T2G", "Gumbel type-2", ("phi", "theta"),
                       _t2g_logcdf, _t2g_logsf, _t2g_logpdf, _t2g_quantile, _start_t2g),
        CompetitorSpec("EWL", "exponentiated Weibull-logistic", ("lam", "alpha", "beta", "theta"),
                       _ewl_logcdf, _ewl_logsf, _ewl_logpdf, _ewl_quantile, _start_ewl),
    )
}


def get_competitor(name: str | CompetitorSpec) -> CompetitorSpec:
    if isinstance(name, CompetitorSpec):
        return name
    try:
        return COMPETITORS[str(name).upper()]
    except KeyError:
        raise DomainError(f"unknown competitor {name!r}; choose from {sorted(COMPETITORS)}") from None


# ---- family adapter ------------------------------------------------------------

@dataclass(frozen=True)
class FamilyModel:
    """The T2GWG family with a fixed baseline behind the competitor interface.

    ``params`` may be a :class:`ParamVector` or the flat array
    ``(alpha, beta, *psi)``.
    """

    baseline: BaselineSpec

    @property
    def name(self) -> str:
        return FAMILY_NAMES.get(self.baseline.name, f"T2GW-{self.baseline.name}")

    @property
    def param_count(self) -> int:
        return 2 + self.baseline.param_count

    @property
    def param_names(self) -> tuple[str, ...]:
        return ParamVector(1.0, 1.0, (1.0,) * self.baseline.param_count).names(self.baseline)

    def _p(self, params) -> ParamVector:
        if isinstance(params, ParamVector):
            return params
        return as_params(params)

    def logcdf(self, x, params):
        return t2gwg_logcdf(self._p(params), self.baseline, x)

    def logsf(self, x, params):
        return t2gwg_logsf(self._p(params), self.baseline, x)

    def logpdf(self, x, params):
        return t2gwg_logpdf(self._p(params), self.baseline, x)

    def cdf(self, x, params):
        return np.exp(self.logcdf(x, params))

    def sf(self, x, params):
        return np.exp(self.logsf(x, params))

    def pdf(self, x, params):
        return np.exp(self.logpdf(x, params))

    def hazard(self, x, params):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(self.logpdf(x, params) - self.logsf(x, params))

    def quantile(self, q, params):
        return t2gwg_quantile(self._p(params), self.baseline, q)

    def support(self, params) -> tuple[float, float]:
        return self.baseline.support(self._p(params).psi)


FAMILY_NAMES = {"exponential": "T2GWE", "uniform": "T2GWU", "pareto": "T2GWP"}
FAMILY_MODELS = {v: k for k, v in FAMILY_NAMES.items()}


def get_model(model) -> CompetitorSpec | FamilyModel:
    """Resolve a competitor, a family name (``T2GWE``...) or a baseline."""
    if isinstance(model, (CompetitorSpec, FamilyModel)):
        return model
    if isinstance(model, BaselineSpec):
        return FamilyModel(model)
    key = str(model)
    if key.upper() in COMPETITORS:
        return COMPETITORS[key.upper()]
    if key.upper() in FAMILY_MODELS:
        return FamilyModel(get_baseline(FAMILY_MODELS[key.upper()]))
    try:
        return FamilyModel(get_baseline(key))
    except DomainError:
        names = sorted(COMPETITORS) + sorted(FAMILY_MODELS)
        raise DomainError(f"unknown model {model!r}; choose from {names} or a baseline name") from None


# ---- numerical derivatives --------------------------------------------------------

def fd_gradient(f: Callable[[np.ndarray], float], theta, rel_step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient with steps relative to each coordinate."""
    theta = np.asarray(theta, dtype=float)
    g = np.empty(theta.size)
    for j in range(theta.size):
        h = rel_step * max(abs(theta[j]), 1e-8)
        up, dn = theta.copy(), theta.copy()
        up[j] += h
        dn[j] -= h
        g[j] = (f(up) - f(dn)) / (2.0 * h)
    return g


def fd_hessian(f: Callable[[np.ndarray], float], theta, rel_step: float = 1e-4) -> np.ndarray:
    """Second differences of ``f`` (four-point stencil off the diagonal)."""
    theta = np.asarray(theta, dtype=float)
    p = theta.size
    h = rel_step * np.maximum(np.abs(theta), 1e-8)
    f0 = f(theta)
    hess = np.empty((p, p))
    for i in range(p):
        ei = np.zeros(p)
        ei[i] = h[i]
        hess[i, i] = (f(theta + ei) - 2.0 * f0 + f(theta - ei)) / h[i] ** 2
        for j in range(i):
            ej = np.zeros(p)
            ej[j] = h[j]
            val = (f(theta + ei + ej) - f(theta + ei - ej) - f(theta - ei + ej) + f(theta - ei - ej)) / (
                4.0 * h[i] * h[j]
            )
            hess[i, j] = hess[j, i] = val
    return hess


# ---- fitting -------------------------------------------------------------------------

def competitor_fit(name: str | CompetitorSpec, data, config: FitConfig | None = None) -> FitResult:
    """Maximum likelihood fit of a competitor model.

    Uses the same multistart driver and convergence rule as
    :func:`oddsgen.estimation.fit`, with a central-difference gradient.
    Standard errors come from a finite-difference observed information and
    are ``None`` when it is not positive definite.
    """
    spec = get_competitor(name)
    config = config or FitConfig()
    if config.method != "mle":
        raise ConfigError(f"competitor models are fitted by maximum likelihood only, not {config.method!r}")
    ds = Dataset.coerce(data)
    if ds.n < spec.param_count + 1:
        raise DataError(f"{spec.name} needs at least {spec.param_count + 1} observations")
    x = ds.sorted
    if x[0] <= 0:
        raise DataError(f"{spec.name} needs strictly positive data")

    def nll(th):
        return spec.neg_log_likelihood(th, x)

    def grad(th):
        if not np.all(th > 0):
            return np.full(th.size, np.nan)
        return fd_gradient(nll, th)

    best = minimize_multistart(nll, grad, spec.initial(x), spec.bounds(x), config)
    est = tuple(float(v) for v in best.theta)
    se = standard_errors(fd_hessian(nll, best.theta)) if best.converged else None
    return FitResult(
        estimates=est,
        std_errors=se,
        objective_value=best.value,
        neg2_loglik=2.0 * nll(best.theta),
        converged=best.converged,
        iterations=best.iterations,
        method="mle",
        model=spec.name,
        param_names=spec.param_names,
        gradient_norm=best.gradient_norm,
        n=ds.n,
    )


def model_params(model, fit_or_params) -> Sequence[float] | ParamVector:
    """Parameters of ``fit_or_params`` in the form ``model`` expects."""
    est = fit_or_params.estimates if isinstance(fit_or_params, FitResult) else fit_or_params
    m = get_model(model)
    if isinstance(m, FamilyModel):
        return est if isinstance(est, ParamVector) else as_params(est)
    return m.validate(est)

"""Goodness-of-fit statistics, information criteria and empirical curves.

``w_star`` and ``a_star`` are the modified Cramer-von Mises and
Anderson-Darling statistics of Chen and Balakrishnan (1995): the
probability integral transform is mapped to normal scores, standardized,
mapped back, and the classical statistics of the result are scaled by
``1 + 0.5/n`` and ``1 + 0.75/n + 2.25/n^2``.  The classical statistics
of the raw transform are kept as ``w_classical`` and ``a_classical``.

The Kolmogorov-Smirnov p-value uses the exact finite-sample distribution
below ``n = 100`` and the asymptotic Kolmogorov series from there on.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from .competitors import FamilyModel, get_model, model_params
from .errors import BoundaryDegeneracyError, ConfigError, DataError
from .estimation import Dataset, FitResult

__all__ = [
    "GofReport",
    "EmpiricalCurves",
    "gof_report",
    "information_criteria",
    "cvm_statistic",
    "ad_statistic",
    "modified_cvm_ad",
    "ks_statistic",
    "ks_pvalue",
    "kolmogorov_sf",
    "empirical_curves",
    "scaled_ttt",
    "EXACT_KS_LIMIT",
]

EXACT_KS_LIMIT = 100
CURVE_POINTS = 200


@dataclass(frozen=True)
class GofReport:
    model: str
    n: int
    k: int
    neg2_loglik: float
    aic: float
    caic: float
    bic: float
    hqic: float
    w_star: float
    a_star: float
    ks_stat: float
    ks_pvalue: float
    w_classical: float
    a_classical: float

    def as_dict(self) -> dict:
        return asdict(self)


def information_criteria(neg2_loglik: float, k: int, n: int) -> dict[str, float]:
    """AIC, CAIC (small-sample corrected AIC), BIC and HQIC."""
    if n <= k + 1:
        raise DataError(f"information criteria need n > k + 1 (n={n}, k={k})")
    aic = neg2_loglik + 2.0 * k
    return {
        "aic": aic,
        "caic": aic + 2.0 * k * (k + 1.0) / (n - k - 1.0),
        "bic": neg2_loglik + k * math.log(n),
        "hqic": neg2_loglik + 2.0 * k * math.log(math.log(n)),
    }


# ---- EDF statistics ------------------------------------------------------------

def _check_log_u(log_u, log_1mu):
    log_u = np.asarray(log_u, dtype=float)
    log_1mu = np.asarray(log_1mu, dtype=float)
    if np.any(~np.isfinite(log_u)) or np.any(~np.isfinite(log_1mu)) or np.any(log_u == 0) or np.any(log_1mu == 0):
        raise BoundaryDegeneracyError("fitted cdf is exactly 0 or 1 at an observation")
    return log_u, log_1mu


def cvm_statistic(u) -> float:
    """``1/(12n) + sum (u_(i) - (2i-1)/(2n))^2``."""
    u = np.sort(np.asarray(u, dtype=float))
    n = u.size
    return float(1.0 / (12.0 * n) + np.sum((u - (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)) ** 2))


def ad_statistic(u=None, *, log_u=None, log_1mu=None) -> float:
    """``-n - (1/n) sum (2i-1) [log u_(i) + log(1 - u_(n+1-i))]``.

    Pass sorted ``log_u`` and ``log_1mu`` directly to keep accuracy in the
    tails.
    """
    if log_u is None:
        u = np.sort(np.asarray(u, dtype=float))
        with np.errstate(divide="ignore"):
            log_u, log_1mu = np.log(u), np.log1p(-u)
    log_u, log_1mu = _check_log_u(log_u, log_1mu)
    n = log_u.size
    coef = 2.0 * np.arange(1, n + 1) - 1.0
    return float(-n - np.sum(coef * (log_u + log_1mu[::-1])) / n)


def _normal_scores(log_u, log_1mu):
    lower = log_u < math.log(0.5)
    return np.where(lower, stats.norm.ppf(np.exp(log_u)), stats.norm.isf(np.exp(log_1mu)))


def modified_cvm_ad(log_u, log_1mu) -> tuple[float, float]:
    """Chen-Balakrishnan ``(W*, A*)`` from sorted log PIT values."""
    log_u, log_1mu = _check_log_u(log_u, log_1mu)
    n = log_u.size
    y = _normal_scores(log_u, log_1mu)
    s = float(np.std(y, ddof=1))
    if not s > 0:
        raise BoundaryDegeneracyError("probability integral transform has no spread")
    z = (y - y.mean()) / s
    lz, l1z = stats.norm.logcdf(z), stats.norm.logsf(z)
    w = cvm_statistic(np.exp(lz)) * (1.0 + 0.5 / n)
    a = ad_statistic(log_u=lz, log_1mu=l1z) * (1.0 + 0.75 / n + 2.25 / n**2)
    return w, a


def ks_statistic(u) -> float:
    """``max_i max(i/n - u_(i), u_(i) - (i-1)/n)``."""
    u = np.sort(np.asarray(u, dtype=float))
    n = u.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))


def kolmogorov_sf(t: float, tol: float = 1e-12) -> float:
    """``P(K > t)`` for the Kolmogorov limit distribution.

    ``2 sum (-1)^(k-1) exp(-2 k^2 t^2)`` for ``t >= 1``; below that the
    Jacobi-theta form of the cdf, which converges fast for small ``t``.
    Both series stop once a term falls under ``tol``.
    """
    t = float(t)
    if t <= 0:
        return 1.0
    if t >= 1.0:
        total, k = 0.0, 1
        while True:
            term = math.exp(-2.0 * k * k * t * t)
            total += term if k % 2 else -term
            if term < tol:
                break
            k += 1
        return min(max(2.0 * total, 0.0), 1.0)
    c = math.pi**2 / (8.0 * t * t)
    total, k = 0.0, 1
    while True:
        term = math.exp(-(2 * k - 1) ** 2 * c)
        total += term
        if term < tol * max(total, 1e-300):
            break
        k += 1
    return min(max(1.0 - math.sqrt(2.0 * math.pi) / t * total, 0.0), 1.0)


def ks_pvalue(d: float, n: int, method: str = "auto") -> float:
    """Kolmogorov-Smirnov p-value for statistic ``d`` at sample size ``n``.

    ``method`` is ``"exact"`` (finite-n distribution), ``"asymptotic"``
    (limit distribution at ``sqrt(n) d``) or ``"auto"`` (exact below
    :data:`EXACT_KS_LIMIT`).
    """
    if method == "auto":
        method = "exact" if n < EXACT_KS_LIMIT else "asymptotic"
    if method == "exact":
        return float(min(max(stats.kstwo.sf(d, n), 0.0), 1.0))
    if method == "asymptotic":
        return kolmogorov_sf(math.sqrt(n) * d)
    raise ConfigError(f"unknown K-S p-value method {method!r}")


# ---- report ---------------------------------------------------------------------

def gof_report(fit: FitResult, model, data, *, ks_method: str = "auto") -> GofReport:
    """Goodness-of-fit statistics of a fitted model.

    Parameters
    ----------
    fit : FitResult
        A converged fit; its estimates are evaluated under ``model``.
    model : str, BaselineSpec, CompetitorSpec or FamilyModel
        Baseline name or spec for the T2GWG family, a family name such as
        ``"T2GWE"``, or a competitor name.
    data : Dataset or array_like
    ks_method : {"auto", "exact", "asymptotic"}

    Raises
    ------
    ConfigError
        If the fit did not converge.
    DataError
        If ``n <= k + 1``.
    BoundaryDegeneracyError
        If the fitted cdf is exactly 0 or 1 at an observation.
    """
    if not fit.converged:
        raise ConfigError("goodness-of-fit needs a converged fit")
    m = get_model(model)
    params = model_params(m, fit)
    ds = Dataset.coerce(data)
    x = ds.sorted
    n, k = ds.n, m.param_count
    log_u = np.asarray(m.logcdf(x, params), dtype=float)
    log_1mu = np.asarray(m.logsf(x, params), dtype=float)
    log_u, log_1mu = _check_log_u(log_u, log_1mu)
    neg2 = -2.0 * float(np.sum(m.logpdf(x, params)))
    crit = information_criteria(neg2, k, n)
    u = np.exp(log_u)
    w_star, a_star = modified_cvm_ad(log_u, log_1mu)
    d = ks_statistic(u)
    return GofReport(
        model=m.name,
        n=n,
        k=k,
        neg2_loglik=neg2,
        w_star=w_star,
        a_star=a_star,
        ks_stat=d,
        ks_pvalue=ks_pvalue(d, n, ks_method),
        w_classical=cvm_statistic(u),
        a_classical=ad_statistic(log_u=log_u, log_1mu=log_1mu),
        **crit,
    )


# ---- empirical curves ---------------------------------------------------------------

@dataclass(frozen=True)
class EmpiricalCurves:
    """Point series for plotting; each entry is an ``(m, 2)`` array.

    ``ttt`` is ``None`` when the data contain negative values.  The fitted
    curves and ``density`` are ``None`` unless a fitted model was supplied.
    ``histogram`` holds ``(left edge, density)`` rows with the last edge
    appended as a final row of density 0.
    """

    ecdf: np.ndarray
    km: np.ndarray
    ttt: np.ndarray | None
    histogram: np.ndarray
    cdf: np.ndarray | None = None
    sf: np.ndarray | None = None
    pdf: np.ndarray | None = None
    hazard: np.ndarray | None = None

    def series(self) -> dict[str, np.ndarray]:
        out = {}
        for name in ("ecdf", "km", "ttt", "histogram", "cdf", "sf", "pdf", "hazard"):
            val = getattr(self, name)
            if val is not None:
                out[name] = val
        return out


def scaled_ttt(x) -> np.ndarray:
    """Rows ``(i/n, T_i/T_n)`` with ``T_i = sum_{j<=i} x_(j) + (n-i) x_(i)``."""
    x = np.sort(np.asarray(x, dtype=float))
    n = x.size
    i = np.arange(1, n + 1)
    T = np.cumsum(x) + (n - i) * x
    if not T[-1] > 0:
        raise DataError("scaled TTT needs a positive total")
    return np.column_stack([i / n, T / T[-1]])


def _grid(m, params, x) -> np.ndarray:
    span = x[-1] - x[0]
    lo, hi = (m.support(params) if isinstance(m, FamilyModel) else (0.0, math.inf))
    a = lo if math.isfinite(lo) else x[0] - 0.1 * span
    b = min(hi, x[-1] + 0.1 * span)
    # open interval keeps the grid off support ends where hazard or density may blow up
    return np.linspace(a, b, CURVE_POINTS + 2)[1:-1]


def empirical_curves(data, fitted=None) -> EmpiricalCurves:
    """ECDF, Kaplan-Meier, scaled TTT and histogram, plus fitted curves.

    Parameters
    ----------
    data : Dataset or array_like
        At least two observations; treated as uncensored.
    fitted : tuple (model, params) or (model, FitResult), optional
        Adds cdf, survival, density and hazard on a 200-point grid.
    """
    ds = Dataset.coerce(data)
    if ds.n < 2:
        raise DataError("empirical curves need at least 2 observations")
    x = ds.sorted
    n = ds.n
    # right-continuous: ties share the value after the jump
    level = np.searchsorted(x, x, side="right") / n
    ecdf = np.column_stack([x, level])
    km = np.column_stack([x, 1.0 - level])
    ttt = scaled_ttt(x) if x[0] >= 0 else None
    edges = np.histogram_bin_edges(x, bins="fd")
    dens, edges = np.histogram(x, bins=edges, density=True)
    hist = np.column_stack([edges, np.r_[dens, 0.0]])
    if fitted is None:
        return EmpiricalCurves(ecdf, km, ttt, hist)
    m = get_model(fitted[0])
    params = model_params(m, fitted[1])
    g = _grid(m, params, x)
    return EmpiricalCurves(
        ecdf,
        km,
        ttt,
        hist,
        cdf=np.column_stack([g, m.cdf(g, params)]),
        sf=np.column_stack([g, m.sf(g, params)]),
        pdf=np.column_stack([g, m.pdf(g, params)]),
        hazard=np.column_stack([g, m.hazard(g, params)]),
    )

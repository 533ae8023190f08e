"""Estimation criteria for the T2GWG family and their analytic gradients.

Every objective is written for minimization over ``theta = (alpha, beta,
psi_1, ...)`` and returns ``+inf`` (never NaN) at infeasible points: a
nonpositive parameter, a datum outside the support, or a log term that is
truly ``-inf``.  Gradients are only meaningful where the objective is
finite.

All criteria work from ``A = alpha * (H / Hbar) ** -beta`` so that
``log F = -A`` and ``log(1 - F) = log(1 - exp(-A))`` stay accurate in both
tails.  With ``L = log H - log Hbar`` the parameter derivatives of ``A`` are::

    dA/dalpha = A / alpha
    dA/dbeta  = -L * A
    dA/dpsi_k = -beta * A * (dH/dpsi_k) / (H * Hbar)
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .baselines import BaselineSpec, get_baseline
from .errors import DomainError
from .family import LogOddsCache, ParamVector, _cache, _logpdf_from_cache, _logsf_from_cache, as_params

__all__ = [
    "neg_log_likelihood",
    "mle_gradient",
    "ls_objective",
    "ls_gradient",
    "wls_objective",
    "wls_gradient",
    "wls_weights",
    "mps_objective",
    "mps_gradient",
    "cvm_objective",
    "cvm_gradient",
    "ad_objective",
    "ad_gradient",
    "OBJECTIVES",
    "METHODS",
]

METHODS = ("mle", "ls", "wls", "mps", "cvm", "ad")


def _sorted(data) -> np.ndarray:
    srt = getattr(data, "sorted", None)
    if srt is not None:
        return np.asarray(srt, dtype=float)
    return np.sort(np.asarray(data, dtype=float).ravel())


def _setup(params, baseline, data):
    """Validated ``(theta, baseline, x, cache)`` or ``None`` when infeasible."""
    baseline = get_baseline(baseline)
    try:
        theta = as_params(params).validate(baseline)
        x = baseline.check_support(_sorted(data), theta.psi)
    except DomainError:
        return None
    return theta, baseline, x, _cache(theta, baseline, x)


def _dA(theta: ParamVector, baseline: BaselineSpec, x: np.ndarray, c: LogOddsCache) -> np.ndarray:
    """Rows are ``dA/dtheta_j`` at every point; shape ``(p, n)``."""
    A = c.A
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        rows = [A / theta.alpha, -c.log_odds * A]
        scale = -theta.beta * np.exp(c.log_A - c.log_H - c.log_Hbar)
        for k in range(baseline.param_count):
            rows.append(scale * baseline.cdf_partial(x, theta.psi, k))
    out = np.vstack(rows)
    # at a support end A is 0 or inf and its sensitivity vanishes in F
    return np.where(np.isfinite(out), out, 0.0)


def _dlogf(theta: ParamVector, baseline: BaselineSpec, x: np.ndarray, c: LogOddsCache, dA: np.ndarray) -> np.ndarray:
    """Rows are ``d log f / dtheta_j`` at every point; shape ``(p, n)``."""
    a, b = theta.alpha, theta.beta
    rows = [np.full_like(x, 1.0 / a) - dA[0], 1.0 / b - c.log_odds - dA[1]]
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        inv_H = np.exp(-c.log_H)
        inv_Hbar = np.exp(-c.log_Hbar)
        for k in range(baseline.param_count):
            dH = baseline.cdf_partial(x, theta.psi, k)
            rows.append(
                baseline.log_density_partial(x, theta.psi, k)
                - (b + 1.0) * dH * inv_H
                - (b - 1.0) * dH * inv_Hbar
                - dA[2 + k]
            )
    return np.vstack(rows)


def _dlog_sf(A: np.ndarray, dA: np.ndarray) -> np.ndarray:
    """``d log(1 - F)`` from ``dA``: ``dA / (exp(A) - 1)``."""
    with np.errstate(over="ignore"):
        return dA / np.expm1(A)


def _finite(value: float) -> float:
    value = float(value)
    return value if math.isfinite(value) else math.inf


def _nan_grad(p: int) -> np.ndarray:
    return np.full(p, np.nan)


# ---- maximum likelihood -------------------------------------------------

def neg_log_likelihood(params, baseline, data) -> float:
    """Negative log-likelihood ``-sum log f(x_i)``; ``+inf`` when infeasible."""
    s = _setup(params, baseline, data)
    if s is None:
        return math.inf
    theta, _, _, c = s
    return _finite(-np.sum(_logpdf_from_cache(theta, c)))


def mle_gradient(params, baseline, data) -> np.ndarray:
    """Gradient of :func:`neg_log_likelihood` over ``(alpha, beta, psi)``."""
    s = _setup(params, baseline, data)
    if s is None:
        return _nan_grad(len(as_params(params).as_array()))
    theta, b, x, c = s
    dA = _dA(theta, b, x, c)
    return -np.sum(_dlogf(theta, b, x, c, dA), axis=1)


# ---- least squares ------------------------------------------------------

def _plotting(n: int) -> np.ndarray:
    return np.arange(1, n + 1) / (n + 1.0)


def wls_weights(n: int) -> np.ndarray:
    """``(n+1)^2 (n+2) / (i (n-i+1))`` for ``i = 1..n``."""
    i = np.arange(1, n + 1, dtype=float)
    return (n + 1.0) ** 2 * (n + 2.0) / (i * (n - i + 1.0))


def _weighted_ls(params, baseline, data, weights):
    s = _setup(params, baseline, data)
    if s is None:
        return math.inf
    _, _, x, c = s
    n = x.size
    w = np.ones(n) if weights is None else weights(n)
    return _finite(np.sum(w * (np.exp(-c.A) - _plotting(n)) ** 2))


def _weighted_ls_grad(params, baseline, data, weights):
    s = _setup(params, baseline, data)
    if s is None:
        return _nan_grad(len(as_params(params).as_array()))
    theta, b, x, c = s
    n = x.size
    w = np.ones(n) if weights is None else weights(n)
    F = np.exp(-c.A)
    dA = _dA(theta, b, x, c)
    return np.sum(2.0 * w * (F - _plotting(n)) * (-F) * dA, axis=1)


def ls_objective(params, baseline, data) -> float:
    """``sum (F(x_(i)) - i/(n+1))^2`` over the order statistics."""
    return _weighted_ls(params, baseline, data, None)


def ls_gradient(params, baseline, data) -> np.ndarray:
    return _weighted_ls_grad(params, baseline, data, None)


def wls_objective(params, baseline, data) -> float:
    """Least squares weighted by the inverse variance of ``F(X_(i))``."""
    return _weighted_ls(params, baseline, data, wls_weights)


def wls_gradient(params, baseline, data) -> np.ndarray:
    return _weighted_ls_grad(params, baseline, data, wls_weights)


# ---- maximum product of spacings ----------------------------------------

def _mps_parts(s):
    theta, b, x, c = s
    A = c.A
    n = x.size
    tie = np.zeros(n, dtype=bool)
    tie[1:] = x[1:] == x[:-1]
    log_d = np.empty(n + 1)
    delta = np.empty(n)
    delta[0] = np.inf
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        delta[1:] = A[:-1] - A[1:]
        log_d[0] = -A[0]
        log_d[1:n] = -A[1:] + np.log(-np.expm1(-delta[1:]))
        log_d[n] = _logsf_from_cache(c)[-1]
    if tie.any():
        log_d[:n][tie] = _logpdf_from_cache(theta, c)[tie]
    return A, delta, tie, log_d


def mps_objective(params, baseline, data) -> float:
    """Negated mean log spacing ``-(1/(n+1)) sum log D_i``.

    ``D_1 = F(x_(1))``, ``D_i = F(x_(i)) - F(x_(i-1))`` and
    ``D_{n+1} = 1 - F(x_(n))``.  A spacing between tied observations is
    replaced by the density at the tied value.
    """
    s = _setup(params, baseline, data)
    if s is None:
        return math.inf
    n = s[2].size
    _, delta, tie, log_d = _mps_parts(s)
    if np.any(~tie[1:] & ~(delta[1:] > 0)):
        return math.inf
    return _finite(-np.sum(log_d) / (n + 1.0))


def mps_gradient(params, baseline, data) -> np.ndarray:
    s = _setup(params, baseline, data)
    if s is None:
        return _nan_grad(len(as_params(params).as_array()))
    theta, b, x, c = s
    n = x.size
    A, delta, tie, _ = _mps_parts(s)
    dA = _dA(theta, b, x, c)
    g = -dA[:, 0] + _dlog_sf(A[-1], dA[:, -1])
    if n > 1:
        with np.errstate(over="ignore", invalid="ignore"):
            r = np.exp(-delta[1:])
            denom = -np.expm1(-delta[1:])
            terms = (-dA[:, 1:] + r * dA[:, :-1]) / denom
        if tie.any():
            dlogf = _dlogf(theta, b, x, c, dA)
            terms[:, tie[1:]] = dlogf[:, 1:][:, tie[1:]]
        g = g + np.sum(terms, axis=1)
    return -g / (n + 1.0)


# ---- Cramer-von Mises ---------------------------------------------------

def cvm_objective(params, baseline, data) -> float:
    """``1/(12 n^2) + (1/n) sum (F(x_(i)) - (2i-1)/(2n))^2``.

    The additive constant does not affect the minimizer.
    """
    s = _setup(params, baseline, data)
    if s is None:
        return math.inf
    _, _, x, c = s
    n = x.size
    u = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    return _finite(1.0 / (12.0 * n * n) + np.sum((np.exp(-c.A) - u) ** 2) / n)


def cvm_gradient(params, baseline, data) -> np.ndarray:
    s = _setup(params, baseline, data)
    if s is None:
        return _nan_grad(len(as_params(params).as_array()))
    theta, b, x, c = s
    n = x.size
    u = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    F = np.exp(-c.A)
    return np.sum(2.0 * (F - u) * (-F) * _dA(theta, b, x, c), axis=1) / n


# ---- Anderson-Darling ---------------------------------------------------

def ad_objective(params, baseline, data) -> float:
    """``-n - (1/n) sum (2i-1) [log F(x_(i)) + log(1 - F(x_(n+1-i)))]``."""
    s = _setup(params, baseline, data)
    if s is None:
        return math.inf
    _, _, x, c = s
    n = x.size
    coef = 2.0 * np.arange(1, n + 1) - 1.0
    log_sf = _logsf_from_cache(c)
    total = np.sum(coef * (-c.A + log_sf[::-1]))
    if not np.isfinite(total):
        return math.inf
    return _finite(-n - total / n)


def ad_gradient(params, baseline, data) -> np.ndarray:
    s = _setup(params, baseline, data)
    if s is None:
        return _nan_grad(len(as_params(params).as_array()))
    theta, b, x, c = s
    n = x.size
    coef = 2.0 * np.arange(1, n + 1) - 1.0
    dA = _dA(theta, b, x, c)
    d_log_sf = _dlog_sf(c.A, dA)
    total = np.sum(coef * (-dA + d_log_sf[:, ::-1]), axis=1)
    return -total / n


Objective = Callable[[object, object, object], float]
Gradient = Callable[[object, object, object], np.ndarray]

OBJECTIVES: dict[str, tuple[Objective, Gradient]] = {
    "mle": (neg_log_likelihood, mle_gradient),
    "ls": (ls_objective, ls_gradient),
    "wls": (wls_objective, wls_gradient),
    "mps": (mps_objective, mps_gradient),
    "cvm": (cvm_objective, cvm_gradient),
    "ad": (ad_objective, ad_gradient),
}

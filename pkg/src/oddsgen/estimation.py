"""Parameter estimation for the T2GWG family.

:func:`fit` minimizes one of six criteria (see :mod:`oddsgen.objectives`)
over an unconstrained reparametrization of ``(alpha, beta, psi)``.  Each
start runs a Nelder-Mead simplex and then a BFGS polish driven by the
analytic gradient; several jittered starts guard against local minima.
The same driver, :func:`minimize_multistart`, backs the competitor fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy import optimize
from scipy.special import expit, logit

from .baselines import BaselineSpec, get_baseline
from .errors import ConfigError, DataError
from .family import ParamVector
from .objectives import (
    METHODS,
    OBJECTIVES,
    ad_gradient,
    ad_objective,
    cvm_gradient,
    cvm_objective,
    ls_gradient,
    ls_objective,
    mle_gradient,
    mps_gradient,
    mps_objective,
    neg_log_likelihood,
    wls_gradient,
    wls_objective,
    wls_weights,
)

__all__ = [
    "Dataset",
    "FitConfig",
    "FitResult",
    "BoxTransform",
    "OptimumSummary",
    "fit",
    "minimize_multistart",
    "numeric_hessian",
    "standard_errors",
    "METHODS",
    "OBJECTIVES",
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
]

GRADIENT_TOL = 1e-4
OPTIMIZERS = ("simplex", "quasi-newton")


class Dataset:
    """A univariate sample in its original order with a sorted copy.

    Parameters
    ----------
    values : array_like
        Finite real observations.
    """

    __slots__ = ("values", "sorted", "n")

    def __init__(self, values: Sequence[float]):
        v = np.array(values, dtype=float).ravel()
        if v.size == 0:
            raise DataError("dataset is empty")
        bad = np.flatnonzero(~np.isfinite(v))
        if bad.size:
            raise DataError(f"non-finite value at position {int(bad[0]) + 1}")
        s = np.sort(v)
        v.flags.writeable = False
        s.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sorted", s)
        object.__setattr__(self, "n", int(v.size))

    def __setattr__(self, name, value):
        raise AttributeError("Dataset is immutable")

    def __len__(self) -> int:
        return self.n

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __repr__(self) -> str:
        return f"Dataset(n={self.n})"

    @classmethod
    def coerce(cls, data) -> "Dataset":
        return data if isinstance(data, cls) else cls(data)


@dataclass(frozen=True)
class FitConfig:
    """Settings for :func:`fit`.

    Attributes
    ----------
    method : str
        One of ``"mle", "ls", "wls", "mps", "cvm", "ad"``.
    starts : int
        Number of starting points; the first is data driven, the rest are
        multiplicative jitters of it in ``[1/4, 4]``.
    max_iterations : int
        Iteration cap per optimizer stage and start.
    tolerance : float
        Objective-change tolerance for the simplex.
    seed : int
        Seed for the jitter stream.
    optimizer : str
        ``"simplex"`` (simplex then gradient polish) or ``"quasi-newton"``
        (gradient search first, simplex only as a fallback).
    xtol : float
        Simplex size below which a start counts as converged.
    """

    method: str = "mle"
    starts: int = 9
    max_iterations: int = 2000
    tolerance: float = 1e-10
    seed: int = 0
    optimizer: str = "simplex"
    xtol: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "method", str(self.method).lower())
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; choose from {list(METHODS)}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"unknown optimizer {self.optimizer!r}; choose from {list(OPTIMIZERS)}")
        if int(self.starts) < 1:
            raise ConfigError("starts must be at least 1")
        if int(self.max_iterations) < 1:
            raise ConfigError("max_iterations must be at least 1")
        if not (self.tolerance > 0 and self.xtol > 0):
            raise ConfigError("tolerances must be positive")

    def with_method(self, method: str) -> "FitConfig":
        return replace(self, method=method)


@dataclass(frozen=True)
class FitResult:
    """Outcome of a fit.

    ``estimates`` is a :class:`ParamVector` for the T2GWG family and a plain
    tuple (ordered as ``param_names``) for competitor models.
    """

    estimates: ParamVector | tuple
    std_errors: tuple[float, ...] | None
    objective_value: float
    neg2_loglik: float
    converged: bool
    iterations: int
    method: str
    model: str = "T2GWG"
    param_names: tuple[str, ...] = ()
    gradient_norm: float = math.nan
    n: int = 0

    def estimate_array(self) -> np.ndarray:
        if isinstance(self.estimates, ParamVector):
            return self.estimates.as_array()
        return np.asarray(self.estimates, dtype=float)

    def as_dict(self) -> dict:
        est = self.estimate_array()
        se = self.std_errors
        return {
            "model": self.model,
            "method": self.method,
            "n": self.n,
            "estimates": {k: float(v) for k, v in zip(self.param_names, est)},
            "std_errors": None if se is None else {k: float(v) for k, v in zip(self.param_names, se)},
            "objective_value": self.objective_value,
            "neg2_loglik": self.neg2_loglik,
            "converged": self.converged,
            "iterations": self.iterations,
            "gradient_norm": self.gradient_norm,
        }


# ---- reparametrization --------------------------------------------------

class BoxTransform:
    """Map box-constrained parameters to an unconstrained vector ``u``.

    ``(0, inf)`` uses ``exp``; ``(lo, inf)`` uses ``lo + exp``; a finite
    interval uses a scaled logistic.
    """

    def __init__(self, bounds: Sequence[tuple[float, float]]):
        self.bounds = [(float(lo), float(hi)) for lo, hi in bounds]
        for lo, hi in self.bounds:
            if not lo < hi:
                raise ConfigError(f"empty parameter interval ({lo}, {hi})")

    def to_theta(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = np.empty_like(u)
        with np.errstate(over="ignore"):
            for j, (lo, hi) in enumerate(self.bounds):
                if math.isinf(hi):
                    out[j] = lo + math.exp(min(u[j], 700.0))
                else:
                    out[j] = lo + (hi - lo) * expit(u[j])
        return out

    def to_u(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        out = np.empty_like(theta)
        for j, (lo, hi) in enumerate(self.bounds):
            if math.isinf(hi):
                out[j] = math.log(max(theta[j] - lo, 1e-300))
            else:
                q = (theta[j] - lo) / (hi - lo)
                out[j] = logit(min(max(q, 1e-12), 1 - 1e-12))
        return out

    def jacobian(self, u) -> np.ndarray:
        """Diagonal of ``d theta / d u``."""
        u = np.asarray(u, dtype=float)
        out = np.empty_like(u)
        for j, (lo, hi) in enumerate(self.bounds):
            if math.isinf(hi):
                out[j] = math.exp(min(u[j], 700.0))
            else:
                s = expit(u[j])
                out[j] = (hi - lo) * s * (1.0 - s)
        return out


# ---- generic multi-start driver -----------------------------------------

@dataclass(frozen=True)
class OptimumSummary:
    theta: np.ndarray
    value: float
    converged: bool
    iterations: int
    gradient_norm: float
    start_index: int
    all_values: tuple[float, ...] = field(default_factory=tuple)


def _start_points(tr: BoxTransform, theta0, starts: int, seed: int) -> list[np.ndarray]:
    u0 = tr.to_u(theta0)
    rng = np.random.default_rng(int(seed))
    jitter = rng.uniform(math.log(0.25), math.log(4.0), size=(max(starts - 1, 0), u0.size))
    # a shift in u is a multiplicative jitter of the parameter (or of its
    # distance to a bound, or of its odds inside a finite interval)
    return [u0] + [u0 + j for j in jitter]


def _simplex_diameter(res) -> float:
    sim = getattr(res, "final_simplex", None)
    if sim is None:
        return math.inf
    pts = sim[0]
    return float(np.max(np.abs(pts[1:] - pts[0]))) if len(pts) > 1 else 0.0


def _one_start(fu, gu, u0, config: FitConfig):
    nit = 0
    u, val, diameter = np.array(u0, dtype=float), fu(u0), math.inf

    def simplex(u_start):
        res = optimize.minimize(
            fu, u_start, method="Nelder-Mead",
            options={"maxiter": config.max_iterations, "xatol": config.xtol,
                     "fatol": config.tolerance, "adaptive": u_start.size > 2},
        )
        return res.x, float(res.fun), int(res.nit), _simplex_diameter(res)

    def polish(u_start):
        if gu is None:
            return u_start, fu(u_start), 0
        with np.errstate(all="ignore"):
            res = optimize.minimize(
                fu, u_start, jac=gu, method="BFGS",
                options={"maxiter": config.max_iterations, "gtol": 1e-7},
            )
        return res.x, float(res.fun), int(res.nit)

    def gnorm(u_at):
        if gu is None:
            return math.nan
        g = gu(u_at)
        return float(np.linalg.norm(g)) if np.all(np.isfinite(g)) else math.inf

    if config.optimizer == "simplex" or gu is None:
        if math.isfinite(val):
            u, val, k, diameter = simplex(u)
            nit += k
        if math.isfinite(val):
            u2, v2, k = polish(u)
            nit += k
            if math.isfinite(v2) and v2 < val:
                u, val, diameter = u2, v2, math.inf
    else:
        if math.isfinite(val):
            u, val, k = polish(u)
            nit += k
        if not (math.isfinite(val) and gnorm(u) <= GRADIENT_TOL):
            u_s, v_s, k, d_s = simplex(np.array(u0, dtype=float) if not math.isfinite(val) else u)
            nit += k
            if math.isfinite(v_s) and (not math.isfinite(val) or v_s <= val):
                u, val, diameter = u_s, v_s, d_s
                u2, v2, k = polish(u)
                nit += k
                if math.isfinite(v2) and v2 < val:
                    u, val, diameter = u2, v2, math.inf
    g = gnorm(u)
    converged = math.isfinite(val) and (g <= GRADIENT_TOL or diameter <= config.xtol)
    return u, val, converged, nit, g


def minimize_multistart(
    objective: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray] | None,
    theta0: Sequence[float],
    bounds: Sequence[tuple[float, float]],
    config: FitConfig,
) -> OptimumSummary:
    """Minimize ``objective(theta)`` over a box from jittered starts.

    The best converged start wins, ties going to the lowest start index; if
    no start converges the best finite one is returned with
    ``converged=False``.
    """
    tr = BoxTransform(bounds)

    def fu(u):
        try:
            v = float(objective(tr.to_theta(u)))
        except (ValueError, FloatingPointError, OverflowError):
            return math.inf
        return v if math.isfinite(v) else math.inf

    gu = None
    if gradient is not None:
        def gu(u):
            g = np.asarray(gradient(tr.to_theta(u)), dtype=float) * tr.jacobian(u)
            return np.where(np.isfinite(g), g, np.nan)

    runs = []
    for idx, u0 in enumerate(_start_points(tr, theta0, config.starts, config.seed)):
        u, val, conv, nit, g = _one_start(fu, gu, u0, config)
        runs.append((idx, u, val, conv, nit, g))

    pool = [r for r in runs if r[3]] or [r for r in runs if math.isfinite(r[2])] or runs
    best = min(pool, key=lambda r: (r[2], r[0]))
    idx, u, val, conv, nit, g = best
    return OptimumSummary(
        theta=tr.to_theta(u),
        value=val,
        converged=conv,
        iterations=nit,
        gradient_norm=g,
        start_index=idx,
        all_values=tuple(r[2] for r in runs),
    )


# ---- standard errors ----------------------------------------------------

def numeric_hessian(gradient: Callable[[np.ndarray], np.ndarray], theta, rel_step: float = 1e-5) -> np.ndarray:
    """Symmetrized central-difference Jacobian of an analytic gradient."""
    theta = np.asarray(theta, dtype=float)
    p = theta.size
    hess = np.empty((p, p))
    for j in range(p):
        h = rel_step * max(abs(theta[j]), 1e-8)
        up, dn = theta.copy(), theta.copy()
        up[j] += h
        dn[j] -= h
        hess[:, j] = (np.asarray(gradient(up)) - np.asarray(gradient(dn))) / (2.0 * h)
    return 0.5 * (hess + hess.T)


def standard_errors(hessian: np.ndarray) -> tuple[float, ...] | None:
    """Square roots of the diagonal of the inverse Hessian, if it is PD."""
    if not np.all(np.isfinite(hessian)):
        return None
    try:
        chol = np.linalg.cholesky(hessian)
    except np.linalg.LinAlgError:
        return None
    inv_chol = np.linalg.solve(chol, np.eye(hessian.shape[0]))
    cov = inv_chol.T @ inv_chol
    return tuple(float(math.sqrt(v)) for v in np.diag(cov))


# ---- family fit ---------------------------------------------------------

def _bounds(baseline: BaselineSpec, x: np.ndarray):
    return [(0.0, math.inf), (0.0, math.inf), *baseline.param_bounds(x)]


def fit(data, baseline: BaselineSpec | str, config: FitConfig | None = None) -> FitResult:
    """Fit the T2GWG family with the given baseline.

    Parameters
    ----------
    data : Dataset or array_like
        Observations, at least three.
    baseline : BaselineSpec or str
    config : FitConfig, optional

    Returns
    -------
    FitResult
        Standard errors are filled in for maximum likelihood only, and only
        when the observed information is positive definite.
    """
    config = config or FitConfig()
    baseline = get_baseline(baseline)
    ds = Dataset.coerce(data)
    if ds.n < 3:
        raise DataError("fitting needs at least 3 observations")
    x = ds.sorted
    obj, grad = OBJECTIVES[config.method]
    theta0 = np.array([1.0, 1.0, *baseline.initial_psi(x)])

    best = minimize_multistart(
        lambda th: obj(th, baseline, ds),
        lambda th: grad(th, baseline, ds),
        theta0,
        _bounds(baseline, x),
        config,
    )
    est = ParamVector.from_array(best.theta)
    se = None
    if config.method == "mle" and best.converged:
        se = standard_errors(numeric_hessian(lambda th: mle_gradient(th, baseline, ds), best.theta))
    return FitResult(
        estimates=est,
        std_errors=se,
        objective_value=best.value,
        neg2_loglik=2.0 * neg_log_likelihood(est, baseline, ds),
        converged=best.converged,
        iterations=best.iterations,
        method=config.method,
        model=_model_name(baseline),
        param_names=est.names(baseline),
        gradient_norm=best.gradient_norm,
        n=ds.n,
    )


def _model_name(baseline: BaselineSpec) -> str:
    return {"exponential": "T2GWE", "uniform": "T2GWU", "pareto": "T2GWP"}.get(baseline.name, f"T2GW-{baseline.name}")

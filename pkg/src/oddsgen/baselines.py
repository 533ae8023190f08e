"""Baseline distributions H whose odds ratio drives the generator.

Every baseline is a stateless object; its parameters ``psi`` are passed in
on each call so that estimation code can vary them freely.  The survival
function is always evaluated through a closed complementary form rather
than as ``1 - H``.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np
from scipy.special import expit

from .errors import DomainError

__all__ = [
    "BaselineSpec",
    "ExponentialBaseline",
    "UniformBaseline",
    "ParetoBaseline",
    "BASELINES",
    "get_baseline",
    "baseline_eval",
    "baseline_inverse",
    "baseline_cdf_partial",
]

# H at the median of the family when alpha = beta = 1: the odds ratio there is 1/log 2.
_Q_START = 1.0 / (1.0 + math.log(2.0))


def _psi(psi: Sequence[float], count: int) -> tuple[float, ...]:
    vals = tuple(float(v) for v in np.atleast_1d(np.asarray(psi, dtype=float)))
    if len(vals) != count:
        raise DomainError(f"expected {count} baseline parameter(s), got {len(vals)}")
    return vals


class BaselineSpec(ABC):
    """Interface for a baseline distribution.

    Subclasses supply log-space pieces ``(log h, log H, log Hbar)``, the
    inverse cdf, and analytic derivatives with respect to their parameters.
    """

    name: str = ""
    param_names: tuple[str, ...] = ()

    @property
    def param_count(self) -> int:
        return len(self.param_names)

    # ---- parameters -----------------------------------------------------
    def validate_psi(self, psi: Sequence[float]) -> tuple[float, ...]:
        vals = _psi(psi, self.param_count)
        for name, v in zip(self.param_names, vals):
            if not (np.isfinite(v) and v > 0):
                raise DomainError(f"baseline parameter {name}={v} must be positive and finite")
        return vals

    def psi_valid(self, psi: Sequence[float]) -> bool:
        try:
            self.validate_psi(psi)
        except DomainError:
            return False
        return True

    @abstractmethod
    def support(self, psi: Sequence[float]) -> tuple[float, float]:
        """Closed support ``(lower, upper)``; either end may be infinite."""

    def check_support(self, x, psi: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo, hi = self.support(psi)
        if np.any(np.isnan(x)) or np.any(x < lo) or np.any(x > hi):
            raise DomainError(f"x outside the closed support [{lo}, {hi}] of the {self.name} baseline")
        return x

    # ---- evaluation -----------------------------------------------------
    @abstractmethod
    def log_parts(self, x, psi: Sequence[float]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(log h, log H, log Hbar)`` at ``x`` (no support check)."""

    def density(self, x, psi):
        return np.exp(self.log_parts(x, psi)[0])

    def cdf(self, x, psi):
        return np.exp(self.log_parts(x, psi)[1])

    def sf(self, x, psi):
        return np.exp(self.log_parts(x, psi)[2])

    @abstractmethod
    def inverse_cdf(self, q, psi: Sequence[float]) -> np.ndarray:
        ...

    def from_log_odds(self, log_odds, psi: Sequence[float]) -> np.ndarray:
        """Point ``x`` with ``log(H(x) / Hbar(x)) == log_odds``."""
        return self.inverse_cdf(expit(log_odds), psi)

    # ---- derivatives ----------------------------------------------------
    @abstractmethod
    def cdf_partial(self, x, psi: Sequence[float], k: int) -> np.ndarray:
        """dH/dpsi_k at ``x``."""

    @abstractmethod
    def log_density_partial(self, x, psi: Sequence[float], k: int) -> np.ndarray:
        """d log h / dpsi_k at ``x``."""

    def _check_index(self, k: int) -> None:
        if not 0 <= k < self.param_count:
            raise IndexError(f"{self.name} baseline has no parameter index {k}")

    # ---- estimation helpers --------------------------------------------
    @abstractmethod
    def param_bounds(self, data: np.ndarray) -> list[tuple[float, float]]:
        """Open interval per parameter within which every datum is in support."""

    @abstractmethod
    def initial_psi(self, data: np.ndarray) -> tuple[float, ...]:
        """Quantile-matching start assuming alpha = beta = 1."""

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


class ExponentialBaseline(BaselineSpec):
    """Exponential baseline with rate ``gamma``; yields the T2GWE model."""

    name = "exponential"
    param_names = ("gamma",)

    def support(self, psi):
        self.validate_psi(psi)
        return 0.0, math.inf

    def log_parts(self, x, psi):
        (g,) = _psi(psi, 1)
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            gx = g * x
            log_hbar = -gx
            log_h = math.log(g) - gx
            log_H = np.log(-np.expm1(-gx))
        return log_h, log_H, log_hbar

    def inverse_cdf(self, q, psi):
        (g,) = _psi(psi, 1)
        with np.errstate(divide="ignore"):
            return -np.log1p(-np.asarray(q, dtype=float)) / g

    def from_log_odds(self, log_odds, psi):
        (g,) = _psi(psi, 1)
        return np.logaddexp(0.0, log_odds) / g

    def cdf_partial(self, x, psi, k):
        self._check_index(k)
        (g,) = _psi(psi, 1)
        x = np.asarray(x, dtype=float)
        return x * np.exp(-g * x)

    def log_density_partial(self, x, psi, k):
        self._check_index(k)
        (g,) = _psi(psi, 1)
        return 1.0 / g - np.asarray(x, dtype=float)

    def param_bounds(self, data):
        return [(0.0, math.inf)]

    def initial_psi(self, data):
        med = float(np.median(data))
        if med <= 0:
            med = float(np.mean(data)) or 1.0
        return (-math.log1p(-_Q_START) / med,)


class UniformBaseline(BaselineSpec):
    """Uniform baseline on ``(0, gamma)``; yields the T2GWU model."""

    name = "uniform"
    param_names = ("gamma",)

    def support(self, psi):
        (g,) = self.validate_psi(psi)
        return 0.0, g

    def log_parts(self, x, psi):
        (g,) = _psi(psi, 1)
        x = np.asarray(x, dtype=float)
        lg = math.log(g)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_h = np.full_like(x, -lg)
            log_H = np.log(x) - lg
            log_hbar = np.log(g - x) - lg
        return log_h, log_H, log_hbar

    def inverse_cdf(self, q, psi):
        (g,) = _psi(psi, 1)
        return g * np.asarray(q, dtype=float)

    def from_log_odds(self, log_odds, psi):
        (g,) = _psi(psi, 1)
        return g * expit(log_odds)

    def cdf_partial(self, x, psi, k):
        self._check_index(k)
        (g,) = _psi(psi, 1)
        return -np.asarray(x, dtype=float) / g**2

    def log_density_partial(self, x, psi, k):
        self._check_index(k)
        (g,) = _psi(psi, 1)
        return np.full_like(np.asarray(x, dtype=float), -1.0 / g)

    def param_bounds(self, data):
        return [(float(np.max(data)), math.inf)]

    def initial_psi(self, data):
        med = float(np.median(data))
        return (max(med / _Q_START, 1.05 * float(np.max(data))),)


class ParetoBaseline(BaselineSpec):
    """Pareto baseline with scale ``theta`` and shape ``k``; yields T2GWP."""

    name = "pareto"
    param_names = ("theta", "k")

    def support(self, psi):
        theta, _ = self.validate_psi(psi)
        return theta, math.inf

    def log_parts(self, x, psi):
        theta, k = _psi(psi, 2)
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_ratio = math.log(theta) - np.log(x)
            log_hbar = k * log_ratio
            log_H = np.log(-np.expm1(log_hbar))
            log_h = math.log(k) + k * math.log(theta) - (k + 1.0) * np.log(x)
        return log_h, log_H, log_hbar

    def inverse_cdf(self, q, psi):
        theta, k = _psi(psi, 2)
        with np.errstate(divide="ignore"):
            return theta * np.exp(-np.log1p(-np.asarray(q, dtype=float)) / k)

    def from_log_odds(self, log_odds, psi):
        theta, k = _psi(psi, 2)
        with np.errstate(over="ignore"):
            return theta * np.exp(np.logaddexp(0.0, log_odds) / k)

    def cdf_partial(self, x, psi, k):
        self._check_index(k)
        theta, shape = _psi(psi, 2)
        x = np.asarray(x, dtype=float)
        tail = (theta / x) ** shape
        if k == 0:
            return -(shape / theta) * tail
        return -tail * np.log(theta / x)

    def log_density_partial(self, x, psi, k):
        self._check_index(k)
        theta, shape = _psi(psi, 2)
        x = np.asarray(x, dtype=float)
        if k == 0:
            return np.full_like(x, shape / theta)
        return 1.0 / shape + math.log(theta) - np.log(x)

    def param_bounds(self, data):
        return [(0.0, float(np.min(data)) * (1.0 - 1e-9)), (0.0, math.inf)]

    def initial_psi(self, data):
        lo = float(np.min(data))
        if lo <= 0:
            raise DomainError("Pareto baseline requires strictly positive data")
        theta = 0.5 * lo
        med = float(np.median(data))
        k = math.log1p(-_Q_START) / math.log(theta / med)
        return (theta, k)


BASELINES: dict[str, BaselineSpec] = {
    "exponential": ExponentialBaseline(),
    "uniform": UniformBaseline(),
    "pareto": ParetoBaseline(),
}


def get_baseline(name: str | BaselineSpec) -> BaselineSpec:
    if isinstance(name, BaselineSpec):
        return name
    try:
        return BASELINES[name.lower()]
    except KeyError:
        raise DomainError(f"unknown baseline {name!r}; choose from {sorted(BASELINES)}") from None


def baseline_eval(b: BaselineSpec, x, psi):
    """Return ``(h, H, Hbar)`` at ``x`` inside the closed support."""
    x = b.check_support(x, psi)
    log_h, log_H, log_hbar = b.log_parts(x, psi)
    return np.exp(log_h), np.exp(log_H), np.exp(log_hbar)


def baseline_inverse(b: BaselineSpec, q, psi):
    q = np.asarray(q, dtype=float)
    if np.any(np.isnan(q)) or np.any((q < 0) | (q > 1)):
        raise DomainError("baseline inverse requires q in [0, 1]")
    b.validate_psi(psi)
    return b.inverse_cdf(q, psi)


def baseline_cdf_partial(b: BaselineSpec, x, psi, k: int):
    b._check_index(k)
    x = b.check_support(x, psi)
    return b.cdf_partial(x, psi, k)

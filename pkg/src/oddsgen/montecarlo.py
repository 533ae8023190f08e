"""Bias and MSE of the six estimators by simulation.

Every replication draws its sample from a stream seeded by a pure function
of ``(plan.seed, N, r)``, so cells may run in any order, or in parallel,
and still give identical reports.  Non-converged fits are counted as
failures and left out of the aggregates; a cell with more than 20%
failures is flagged.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

import numpy as np

from .baselines import get_baseline
from .errors import ConfigError, DomainError
from .estimation import METHODS, FitConfig, fit
from .family import ParamVector, as_params, t2gwg_sample

__all__ = [
    "SimPlan",
    "SimCell",
    "SimReport",
    "Inversion",
    "MonotonicityCheck",
    "run_simulation",
    "replication_seed",
    "full_plan",
    "ci_plan",
    "check_monotone",
    "format_table",
    "REFERENCE_TRUTH",
    "REFERENCE_SIZES",
    "FAILURE_FLAG_FRACTION",
]

REFERENCE_TRUTH = ParamVector(2.5, 0.8, (1.3,))
REFERENCE_SIZES = (50, 100, 250, 500, 1000)
FAILURE_FLAG_FRACTION = 0.2
CSV_COLUMNS = ("method", "N", "parameter", "bias", "mse", "failures", "replications", "mse_se", "flagged")


@dataclass(frozen=True)
class SimPlan:
    """What to simulate.

    ``starts`` and ``optimizer`` are handed to every fit; a single start
    from ``(1, 1, initial_psi)`` with the quasi-Newton driver is the fast
    profile, the defaults of :class:`~oddsgen.estimation.FitConfig` the
    thorough one.
    """

    truth: ParamVector = REFERENCE_TRUTH
    baseline: str = "exponential"
    sample_sizes: tuple[int, ...] = REFERENCE_SIZES
    replications: int = 1000
    methods: tuple[str, ...] = METHODS
    seed: int = 0
    starts: int = 9
    optimizer: str = "simplex"
    tolerance: float = 1e-10

    def __post_init__(self):
        try:
            object.__setattr__(self, "truth", as_params(self.truth))
        except DomainError as exc:
            raise ConfigError(f"invalid truth: {exc}") from None
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        object.__setattr__(self, "methods", tuple(str(m).lower() for m in self.methods))
        if int(self.replications) < 1:
            raise ConfigError("replications must be at least 1")
        if not self.sample_sizes or any(n < 10 for n in self.sample_sizes):
            raise ConfigError("sample sizes must all be at least 10")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ConfigError(f"methods must be drawn from {METHODS}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        try:
            self.truth.validate(get_baseline(self.baseline))
        except DomainError as exc:
            raise ConfigError(f"invalid truth for baseline {self.baseline!r}: {exc}") from None
        self.fit_config("mle")

    def fit_config(self, method: str, seed: int = 0) -> FitConfig:
        return FitConfig(method=method, starts=self.starts, optimizer=self.optimizer,
                         tolerance=self.tolerance, seed=seed)

    def param_names(self) -> tuple[str, ...]:
        return self.truth.names(get_baseline(self.baseline))


def full_plan(**overrides) -> SimPlan:
    """Truth ``(2.5, 0.8, 1.3)``, exponential baseline, N in {50..1000}, 1000 reps."""
    return SimPlan(**overrides)


def ci_plan(**overrides) -> SimPlan:
    """250 replications at N in {100, 1000}, one quasi-Newton start per fit."""
    base = dict(sample_sizes=(100, 1000), replications=250, starts=1, optimizer="quasi-newton")
    base.update(overrides)
    return SimPlan(**base)


def replication_seed(seed: int, n: int, r: int) -> int:
    """Seed for replication ``r`` at sample size ``n``."""
    return int(np.random.SeedSequence([int(seed), int(n), int(r)]).generate_state(2, dtype=np.uint64)[0])


@dataclass(frozen=True)
class SimCell:
    method: str
    N: int
    parameter: str
    bias: float
    mse: float
    failures: int
    replications: int
    mse_se: float

    @property
    def flagged(self) -> bool:
        return self.failures > FAILURE_FLAG_FRACTION * self.replications

    def row(self) -> dict:
        d = asdict(self)
        d["flagged"] = self.flagged
        return d


@dataclass(frozen=True)
class Inversion:
    method: str
    parameter: str
    n_low: int
    n_high: int
    mse_low: float
    mse_high: float
    overlapping: bool


@dataclass(frozen=True)
class MonotonicityCheck:
    """MSE decrease across sample sizes, cell by cell.

    ``ok`` holds when every method has at most one inversion in total and
    that inversion lies within Monte Carlo error (the two-standard-error
    intervals of the neighbouring MSEs overlap).
    """

    inversions: tuple[Inversion, ...]
    ok: bool

    def by_method(self) -> dict[str, list[Inversion]]:
        out: dict[str, list[Inversion]] = {}
        for inv in self.inversions:
            out.setdefault(inv.method, []).append(inv)
        return out


@dataclass(frozen=True)
class SimReport:
    plan: SimPlan
    cells: tuple[SimCell, ...]
    estimates: dict = field(default_factory=dict, compare=False, repr=False)

    def cell(self, method: str, n: int, parameter: str) -> SimCell:
        for c in self.cells:
            if c.method == method and c.N == n and c.parameter == parameter:
                return c
        raise KeyError((method, n, parameter))

    def flagged(self) -> list[SimCell]:
        return [c for c in self.cells if c.flagged]

    def monotonicity(self) -> MonotonicityCheck:
        return check_monotone(self)

    def to_csv(self, stream=None) -> str:
        buf = stream if stream is not None else io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for c in self.cells:
            w.writerow(c.row())
        return buf.getvalue() if stream is None else ""

    def as_dict(self) -> dict:
        plan = asdict(self.plan)
        plan["truth"] = list(self.plan.truth.as_array())
        mono = self.monotonicity()
        return {
            "plan": plan,
            "cells": [{k: _json_safe(v) for k, v in c.row().items()} for c in self.cells],
            "monotonicity": {"ok": mono.ok, "inversions": [asdict(i) for i in mono.inversions]},
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.as_dict(), indent=indent, allow_nan=False)


def _json_safe(v):
    return None if isinstance(v, float) and not math.isfinite(v) else v


# ---- running --------------------------------------------------------------------

def _run_replication(args) -> tuple[int, int, dict[str, np.ndarray | None]]:
    plan, n, r = args
    s = replication_seed(plan.seed, n, r)
    x = t2gwg_sample(plan.truth, plan.baseline, n, s)
    out: dict[str, np.ndarray | None] = {}
    for method in plan.methods:
        try:
            res = fit(x, plan.baseline, plan.fit_config(method, seed=s))
        except (ValueError, ArithmeticError):
            out[method] = None
            continue
        out[method] = res.estimate_array() if res.converged else None
    return n, r, out


def _aggregate(plan: SimPlan, est: dict) -> tuple[SimCell, ...]:
    truth = plan.truth.as_array()
    names = plan.param_names()
    cells = []
    for method in plan.methods:
        for n in plan.sample_sizes:
            arr = est[(method, n)]
            ok = np.all(np.isfinite(arr), axis=1)
            failures = int(np.sum(~ok))
            good = arr[ok]
            for j, name in enumerate(names):
                if good.shape[0] == 0:
                    bias = mse = se = math.nan
                else:
                    err = good[:, j] - truth[j]
                    bias = float(np.mean(err))
                    sq = err * err
                    mse = float(np.mean(sq))
                    se = float(np.std(sq, ddof=1) / math.sqrt(sq.size)) if sq.size > 1 else math.nan
                cells.append(SimCell(method, n, name, bias, mse, failures, plan.replications, se))
    return tuple(cells)


def run_simulation(
    plan: SimPlan,
    workers: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> SimReport:
    """Fit every method to every replicated sample and aggregate.

    Parameters
    ----------
    plan : SimPlan
    workers : int
        Processes to spread replications over; results do not depend on it.
    progress : callable, optional
        Called as ``progress(done, total)`` after each replication.
    """
    jobs = [(plan, n, r) for n in plan.sample_sizes for r in range(plan.replications)]
    p = len(plan.truth.as_array())
    est = {(m, n): np.full((plan.replications, p), np.nan) for m in plan.methods for n in plan.sample_sizes}

    def absorb(results: Iterable):
        for done, (n, r, out) in enumerate(results, 1):
            for m, v in out.items():
                if v is not None:
                    est[(m, n)][r] = v
            if progress is not None:
                progress(done, len(jobs))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            absorb(pool.map(_run_replication, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        absorb(map(_run_replication, jobs))
    return SimReport(plan, _aggregate(plan, est), est)


# ---- monotonicity -------------------------------------------------------------------

def check_monotone(report: SimReport, z: float = 2.0) -> MonotonicityCheck:
    """List MSE increases between adjacent sample sizes."""
    plan = report.plan
    sizes = sorted(plan.sample_sizes)
    inversions = []
    for method in plan.methods:
        for name in plan.param_names():
            for lo, hi in zip(sizes[:-1], sizes[1:]):
                a, b = report.cell(method, lo, name), report.cell(method, hi, name)
                if not (b.mse < a.mse):
                    overlap = (b.mse - z * b.mse_se) <= (a.mse + z * a.mse_se)
                    inversions.append(Inversion(method, name, lo, hi, a.mse, b.mse, bool(overlap)))
    per_method: dict[str, list[Inversion]] = {}
    for inv in inversions:
        per_method.setdefault(inv.method, []).append(inv)
    ok = all(len(v) <= 1 and v[0].overlapping for v in per_method.values())
    return MonotonicityCheck(tuple(inversions), ok)


def format_table(report: SimReport, digits: int = 4) -> str:
    """Plain-text table laid out as bias/MSE columns per method."""
    names = report.plan.param_names()
    lines = []
    head = ["N", "method"] + [f"bias({p})" for p in names] + [f"mse({p})" for p in names] + ["fail"]
    lines.append("  ".join(f"{h:>12}" for h in head))
    for n in report.plan.sample_sizes:
        for m in report.plan.methods:
            cells = [report.cell(m, n, p) for p in names]
            vals = [f"{c.bias:.{digits}f}" for c in cells] + [f"{c.mse:.{digits}f}" for c in cells]
            lines.append("  ".join(f"{v:>12}" for v in [str(n), m.upper(), *vals, str(cells[0].failures)]))
    return "\n".join(lines)

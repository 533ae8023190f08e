"""Exponentiated-odds-ratio generator and the Type-2 Gumbel Weibull-G family."""

from .baselines import BASELINES, get_baseline
from .competitors import COMPETITORS, competitor_fit, get_model
from .errors import BoundaryDegeneracyError, ConfigError, DataError, DomainError, IntegrationError
from .estimation import METHODS, Dataset, FitConfig, FitResult, fit
from .family import (
    ParamVector,
    compose_cdf,
    t2gwg_cdf,
    t2gwg_hazard,
    t2gwg_logpdf,
    t2gwg_pdf,
    t2gwg_quantile,
    t2gwg_sample,
    t2gwg_sf,
)
from .gof import empirical_curves, gof_report
from .montecarlo import SimPlan, ci_plan, full_plan, run_simulation

__version__ = "0.1.0"

__all__ = [
    "BASELINES",
    "COMPETITORS",
    "METHODS",
    "BoundaryDegeneracyError",
    "ConfigError",
    "DataError",
    "Dataset",
    "DomainError",
    "FitConfig",
    "FitResult",
    "IntegrationError",
    "ParamVector",
    "SimPlan",
    "ci_plan",
    "competitor_fit",
    "compose_cdf",
    "empirical_curves",
    "fit",
    "full_plan",
    "get_baseline",
    "get_model",
    "gof_report",
    "run_simulation",
    "t2gwg_cdf",
    "t2gwg_hazard",
    "t2gwg_logpdf",
    "t2gwg_pdf",
    "t2gwg_quantile",
    "t2gwg_sample",
    "t2gwg_sf",
]

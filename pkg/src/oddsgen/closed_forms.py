"""Closed-form expressions for the three shipped special cases.

These are written out directly in ``x`` (no log-odds machinery) and serve
as an independent cross-check of the generic family functions.

Three corrections relative to commonly printed forms are applied here:
the T2GWE density carries the factor ``gamma``; the T2GWE quantile is
``log(1 + (-log p / alpha)**(-1/beta)) / gamma``; the T2GWU quantile is
scaled by ``gamma``.
"""

import numpy as np

__all__ = [
    "t2gwe_cdf", "t2gwe_pdf", "t2gwe_hazard", "t2gwe_reverse_hazard", "t2gwe_quantile",
    "t2gwu_cdf", "t2gwu_pdf", "t2gwu_hazard", "t2gwu_reverse_hazard", "t2gwu_quantile",
    "t2gwp_cdf", "t2gwp_pdf", "t2gwp_hazard", "t2gwp_reverse_hazard", "t2gwp_quantile",
]


def t2gwe_cdf(x, alpha, beta, gamma):
    return np.exp(-alpha * np.expm1(gamma * x) ** (-beta))


def t2gwe_pdf(x, alpha, beta, gamma):
    u = np.expm1(gamma * x)
    return alpha * beta * gamma * np.exp(gamma * x) * u ** (-beta - 1) * np.exp(-alpha * u ** (-beta))


def t2gwe_reverse_hazard(x, alpha, beta, gamma):
    u = np.expm1(gamma * x)
    return alpha * beta * gamma * np.exp(gamma * x) * u ** (-beta - 1)


def t2gwe_hazard(x, alpha, beta, gamma):
    return t2gwe_pdf(x, alpha, beta, gamma) / -np.expm1(-alpha * np.expm1(gamma * x) ** (-beta))


def t2gwe_quantile(p, alpha, beta, gamma):
    return np.log1p((-np.log(p) / alpha) ** (-1.0 / beta)) / gamma


def t2gwu_cdf(x, alpha, beta, gamma):
    return np.exp(-alpha * (x / (gamma - x)) ** (-beta))


def t2gwu_pdf(x, alpha, beta, gamma):
    # h * H^(-b-1) * Hbar^(b-1) with h = 1/g, H = x/g, Hbar = (g-x)/g
    core = alpha * beta * gamma * x ** (-beta - 1) * (gamma - x) ** (beta - 1)
    return core * np.exp(-alpha * (x / (gamma - x)) ** (-beta))


def t2gwu_reverse_hazard(x, alpha, beta, gamma):
    return alpha * beta * gamma * x ** (-beta - 1) * (gamma - x) ** (beta - 1)


def t2gwu_hazard(x, alpha, beta, gamma):
    return t2gwu_pdf(x, alpha, beta, gamma) / -np.expm1(-alpha * (x / (gamma - x)) ** (-beta))


def t2gwu_quantile(p, alpha, beta, gamma):
    return gamma / (1.0 + (-np.log(p) / alpha) ** (1.0 / beta))


def t2gwp_cdf(x, alpha, beta, theta, k):
    return np.exp(-alpha * ((x / theta) ** k - 1.0) ** (-beta))


def t2gwp_pdf(x, alpha, beta, theta, k):
    u = (x / theta) ** k - 1.0
    return beta * alpha * k * x ** (k - 1) * theta ** (-k) * u ** (-beta - 1) * np.exp(-alpha * u ** (-beta))


def t2gwp_reverse_hazard(x, alpha, beta, theta, k):
    u = (x / theta) ** k - 1.0
    return beta * alpha * k * x ** (k - 1) * theta ** (-k) * u ** (-beta - 1)


def t2gwp_hazard(x, alpha, beta, theta, k):
    u = (x / theta) ** k - 1.0
    return t2gwp_pdf(x, alpha, beta, theta, k) / -np.expm1(-alpha * u ** (-beta))


def t2gwp_quantile(p, alpha, beta, theta, k):
    return theta * ((-np.log(p) / alpha) ** (-1.0 / beta) + 1.0) ** (1.0 / k)

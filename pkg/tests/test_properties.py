import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from conftest import ALL_CASES, CASE_IDS, TRUTH, integrate_density
from oddsgen.errors import DomainError, IntegrationError
from oddsgen.family import (
    ParamVector,
    t2gwg_cdf,
    t2gwg_pdf,
    t2gwg_quantile,
    t2gwg_sample,
)
from oddsgen.properties import (
    QuadratureConfig,
    cdf_dominance_check,
    char_fn,
    conditional_moment,
    incomplete_moment,
    lr_ordering_check,
    mgf,
    moment_raw,
    moment_summary,
    order_statistic_pdf,
    order_statistic_pdf_mixture,
    pdf_series_truncated,
    renyi_entropy,
    series_expansion,
    shannon_entropy,
    tail_exponential_rate,
    tail_power_exponent,
)

SERIES_POINT = ParamVector(0.5, 0.5, (1.0,))


@pytest.fixture(scope="module")
def big_sample():
    return t2gwg_sample(TRUTH, "exponential", 10**6, 2024)


def within_3se(estimate, draws):
    se = draws.std(ddof=1) / math.sqrt(draws.size)
    return abs(estimate - draws.mean()) < 3 * se


# ---- moments ----------------------------------------------------------------

@pytest.mark.parametrize("baseline, params", ALL_CASES, ids=CASE_IDS)
def test_zeroth_moment_is_one(baseline, params):
    assert moment_raw(params, baseline, 0) == pytest.approx(1.0, abs=1e-8)


def test_mean_matches_monte_carlo(big_sample):
    assert within_3se(moment_raw(TRUTH, "exponential", 1), big_sample)


def test_uniform_mean_matches_monte_carlo():
    p = ParamVector(1.0, 1.0, (1.0,))
    draws = t2gwg_sample(p, "uniform", 10**7, 5)
    assert within_3se(moment_raw(p, "uniform", 1), draws)


def test_moment_summary_against_sample(big_sample):
    s = moment_summary(TRUTH, "exponential")
    assert s.mean == pytest.approx(moment_raw(TRUTH, "exponential", 1), rel=1e-12)
    raw2 = moment_raw(TRUTH, "exponential", 2)
    assert s.variance == pytest.approx(raw2 - s.mean**2, rel=1e-8)
    assert s.variance == pytest.approx(big_sample.var(), rel=0.01)
    assert s.skewness > 0 and s.kurtosis > 3


def test_pareto_moment_existence():
    p = ParamVector(1.0, 1.0, (1.0, 2.0))
    # survival ~ alpha (theta/x)^(k beta): moments exist below order k*beta
    assert tail_power_exponent(p, "pareto") == pytest.approx(2.0, rel=1e-5)
    assert np.isfinite(moment_raw(p, "pareto", 1))
    with pytest.raises(IntegrationError):
        moment_raw(p, "pareto", 2)
    with pytest.raises(IntegrationError):
        moment_raw(p, "pareto", 2.5)


def test_tail_probes():
    assert tail_exponential_rate(TRUTH, "exponential") == pytest.approx(0.8 * 1.3, rel=1e-6)
    assert tail_exponential_rate(ParamVector(1.0, 1.0, (1.0, 2.0)), "pareto") == 0.0
    assert tail_power_exponent(ParamVector(1.0, 1.0, (1.0,)), "uniform") == math.inf


def test_moment_order_errors():
    with pytest.raises(DomainError):
        moment_raw(TRUTH, "exponential", -1)
    with pytest.raises(DomainError):
        QuadratureConfig(rel_tol=0)


# ---- incomplete and conditional moments ---------------------------------------

def test_incomplete_moment_limits():
    assert incomplete_moment(TRUTH, "exponential", 1, 0.0) == 0.0
    full = moment_raw(TRUTH, "exponential", 2)
    assert incomplete_moment(TRUTH, "exponential", 2, math.inf) == pytest.approx(full, abs=1e-8)
    p = ParamVector(2.5, 0.8, (3.0,))
    assert incomplete_moment(p, "uniform", 1, 3.0) == pytest.approx(moment_raw(p, "uniform", 1), abs=1e-8)


def test_incomplete_moment_monte_carlo(big_sample):
    z = float(t2gwg_quantile(TRUTH, "exponential", 0.5))
    assert within_3se(incomplete_moment(TRUTH, "exponential", 1, z), big_sample * (big_sample <= z))


@pytest.mark.parametrize("baseline, params", ALL_CASES[:6], ids=CASE_IDS[:6])
def test_incomplete_moment_nondecreasing(baseline, params):
    zs = t2gwg_quantile(params, baseline, np.linspace(0.01, 0.99, 12))
    vals = [incomplete_moment(params, baseline, 1, z) for z in zs]
    assert np.all(np.diff(vals) >= 0)


def test_conditional_moment_limits_and_bound():
    full = moment_raw(TRUTH, "exponential", 1)
    assert conditional_moment(TRUTH, "exponential", 1, 0.0) == pytest.approx(full, rel=1e-10)
    for a in [0.2, 0.7, 1.5, 4.0, 9.0]:
        for r in (1, 2, 3):
            assert conditional_moment(TRUTH, "exponential", r, a) >= a**r


def test_conditional_moment_matches_difference_form():
    a = 0.9
    lhs = conditional_moment(TRUTH, "exponential", 2, a)
    rhs = (moment_raw(TRUTH, "exponential", 2) - incomplete_moment(TRUTH, "exponential", 2, a)) / (
        1 - float(t2gwg_cdf(TRUTH, "exponential", a))
    )
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_conditional_moment_monte_carlo(big_sample):
    a = float(t2gwg_quantile(TRUTH, "exponential", 0.5))
    assert within_3se(conditional_moment(TRUTH, "exponential", 1, a), big_sample[big_sample >= a])


# ---- generating functions -------------------------------------------------------

def test_generating_functions_at_zero():
    assert mgf(TRUTH, "exponential", 0.0) == pytest.approx(1.0, abs=1e-10)
    re, im = char_fn(TRUTH, "exponential", 0.0)
    assert re == pytest.approx(1.0, abs=1e-10) and im == pytest.approx(0.0, abs=1e-10)


def test_mgf_slope_is_mean():
    h = 1e-4
    slope = (mgf(TRUTH, "exponential", h) - mgf(TRUTH, "exponential", -h)) / (2 * h)
    assert slope == pytest.approx(moment_raw(TRUTH, "exponential", 1), rel=1e-4)


def test_mgf_monte_carlo(big_sample):
    t = 0.3
    assert within_3se(mgf(TRUTH, "exponential", t), np.exp(t * big_sample))


def test_mgf_divergence_reported():
    with pytest.raises(IntegrationError):
        mgf(TRUTH, "exponential", 1.2)
    with pytest.raises(IntegrationError):
        mgf(ParamVector(1.0, 1.0, (1.0, 2.0)), "pareto", 0.01)
    assert np.isfinite(mgf(ParamVector(1.0, 1.0, (1.0, 2.0)), "pareto", -0.5))
    assert np.isfinite(mgf(ParamVector(1.0, 1.0, (2.0,)), "uniform", 5.0))


@pytest.mark.parametrize("baseline, params", [ALL_CASES[0], ALL_CASES[7], ALL_CASES[12]])
def test_char_fn_modulus(baseline, params):
    for t in np.linspace(-6, 6, 7):
        re, im = char_fn(params, baseline, t)
        assert re * re + im * im <= 1 + 1e-9


def test_char_fn_monte_carlo(big_sample):
    re, im = char_fn(TRUTH, "exponential", 2.0)
    assert within_3se(re, np.cos(2.0 * big_sample))
    assert within_3se(im, np.sin(2.0 * big_sample))


# ---- entropy ----------------------------------------------------------------------

@pytest.mark.parametrize("baseline, params", [ALL_CASES[0], ALL_CASES[7], ALL_CASES[11]])
def test_renyi_brackets_shannon(baseline, params):
    lo = renyi_entropy(params, baseline, 1.001)
    hi = renyi_entropy(params, baseline, 0.999)
    sh = shannon_entropy(params, baseline)
    assert lo <= sh <= hi
    assert 0.5 * (lo + hi) == pytest.approx(sh, abs=1e-3)


@pytest.mark.parametrize("baseline, params", [ALL_CASES[0], ALL_CASES[1], ALL_CASES[7]])
def test_renyi_nonincreasing(baseline, params):
    vals = [renyi_entropy(params, baseline, w) for w in (0.5, 0.8, 1.2, 2.0, 5.0)]
    assert np.all(np.diff(vals) <= 1e-12)


def test_renyi_order_two_uniform():
    p = ParamVector(1.0, 1.0, (1.0,))
    sq = integrate_density(p, "uniform", power=2.0)
    r2 = renyi_entropy(p, "uniform", 2.0)
    assert r2 == pytest.approx(-math.log(sq), rel=1e-8)
    assert (r2 <= 0) == (sq >= 1)


def test_renyi_divergence_reported():
    # density ~ (gamma - x)^(beta - 1) at the right end
    with pytest.raises(IntegrationError):
        renyi_entropy(ParamVector(1.0, 0.5, (1.0,)), "uniform", 2.0)
    with pytest.raises(DomainError):
        renyi_entropy(TRUTH, "exponential", 1.0)


# ---- order statistics ------------------------------------------------------------

def test_order_statistic_single():
    x = t2gwg_quantile(TRUTH, "exponential", np.linspace(0.01, 0.99, 50))
    np.testing.assert_allclose(order_statistic_pdf(TRUTH, "exponential", 1, 1, x), t2gwg_pdf(TRUTH, "exponential", x), rtol=1e-14)


@pytest.mark.parametrize("baseline, params", ALL_CASES, ids=CASE_IDS)
@pytest.mark.parametrize("i, n", [(1, 5), (3, 5), (5, 5)])
def test_order_statistic_forms_agree(baseline, params, i, n):
    x = t2gwg_quantile(params, baseline, np.linspace(0.05, 0.9, 60))
    direct = order_statistic_pdf(params, baseline, i, n, x)
    mixture = order_statistic_pdf_mixture(params, baseline, i, n, x)
    np.testing.assert_allclose(mixture, direct, rtol=1e-10)


@pytest.mark.parametrize("baseline, params", [ALL_CASES[0], ALL_CASES[7], ALL_CASES[12]])
def test_order_statistic_normalizes(baseline, params):
    probs = [0.0, 1e-9, 1e-4, 0.05, 0.3, 0.6, 0.9, 0.999, 1 - 1e-7, 1.0]
    cuts = np.unique(np.asarray(t2gwg_quantile(params, baseline, probs), dtype=float))
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        total += integrate.quad(lambda v: float(order_statistic_pdf(params, baseline, 2, 4, v)), a, b,
                                epsabs=1e-13, epsrel=1e-11, limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-7)


def test_order_statistic_errors():
    with pytest.raises(DomainError):
        order_statistic_pdf(TRUTH, "exponential", 0, 3, 1.0)
    with pytest.raises(DomainError):
        order_statistic_pdf(TRUTH, "exponential", 4, 3, 1.0)


# ---- series expansion --------------------------------------------------------------

def test_series_leading_term():
    x = 0.8
    a, b = 1.3, 0.7
    p = ParamVector(a, b, (1.0,))
    H = -math.expm1(-x)
    h = math.exp(-x)
    val = pdf_series_truncated(p, "exponential", x, 0, 0).value
    assert val == pytest.approx(a * b * h * H ** (-b - 1), rel=1e-12)
    # summing every k at j = 0 rebuilds the density without its exp factor
    full_k = pdf_series_truncated(p, "exponential", x, 0, 200).value
    assert full_k == pytest.approx(a * b * h * H ** (-b - 1) * (1 - H) ** (b - 1), rel=1e-10)


def test_series_matches_density_at_median():
    x = float(t2gwg_quantile(SERIES_POINT, "exponential", 0.5))
    res = pdf_series_truncated(SERIES_POINT, "exponential", x, 60, 60)
    assert not res.diverged
    assert res.value == pytest.approx(float(t2gwg_pdf(SERIES_POINT, "exponential", x)), rel=1e-3)


def test_series_error_shrinks_with_truncation():
    x = float(t2gwg_quantile(SERIES_POINT, "exponential", 0.5))
    f = float(t2gwg_pdf(SERIES_POINT, "exponential", x))
    errs = [abs(pdf_series_truncated(SERIES_POINT, "exponential", x, m, m).value - f) for m in (20, 40, 60)]
    # by 40 terms the error sits at rounding level, so only the first step is strict
    assert errs[0] > errs[1] >= errs[2] - 1e-16


def test_series_excluded_terms():
    # beta = 0.5: b* = k - (j+1)/2 vanishes when j is odd and k = (j+1)/2
    ser = series_expansion(SERIES_POINT, 9, 20)
    assert ser.excluded == 5
    assert all(abs(t[3]) >= 1e-8 for t in ser.terms)
    assert series_expansion(ParamVector(0.5, math.sqrt(2) / 2, (1.0,)), 9, 20).excluded == 0


def test_series_divergence_flag():
    # large alpha at a low quantile: the exp series alternates wildly
    p = ParamVector(40.0, 1.3, (1.0,))
    x = float(t2gwg_quantile(p, "exponential", 0.3))
    assert pdf_series_truncated(p, "exponential", x, 20, 20).diverged


# ---- stochastic ordering -----------------------------------------------------------

def test_lr_ordering_examples():
    grid = np.linspace(0.01, 12.0, 1000)
    assert lr_ordering_check(1.0, 2.0, 1.0, "exponential", grid)
    assert not lr_ordering_check(1.0, 1.0, 1.0, "exponential", grid)
    assert cdf_dominance_check(1.0, 2.0, 1.0, "exponential", grid)


@settings(max_examples=30, deadline=None)
@given(
    a1=st.floats(0.05, 10.0),
    ratio=st.floats(1.01, 10.0),
    beta=st.floats(0.2, 4.0),
    name=st.sampled_from(["exponential", "uniform", "pareto"]),
)
def test_lr_ordering_random_pairs(a1, ratio, beta, name):
    grids = {
        "exponential": np.linspace(0.05, 8.0, 400),
        "uniform": np.linspace(0.01, 0.99, 400),
        "pareto": np.linspace(1.01, 30.0, 400),
    }
    assert lr_ordering_check(a1, a1 * ratio, beta, name, grids[name])
    assert cdf_dominance_check(a1, a1 * ratio, beta, name, grids[name])

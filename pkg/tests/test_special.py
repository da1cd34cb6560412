import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import kv

from hyperbm.special import (NODES, W_GAUSS, W_KRONROD, DomainError, QuadratureError, QuadratureSpec,
                             bessel_k, integrate_interval, integrate_semi_infinite, log_gamma, whittaker_w)


def test_kronrod_exact_to_degree_22():
    for k in range(23):
        exact = (1 - (-1) ** (k + 1)) / (k + 1)
        assert abs(np.dot(W_KRONROD, NODES ** k) - exact) < 1e-14


def test_gauss_exact_to_degree_13():
    for k in range(14):
        exact = (1 - (-1) ** (k + 1)) / (k + 1)
        assert abs(np.dot(W_GAUSS, NODES ** k) - exact) < 1e-14


def test_semi_infinite_examples():
    assert abs(integrate_semi_infinite(lambda u: np.exp(-u)) - 1) < 1e-12
    val = integrate_semi_infinite(lambda u: np.exp(-1 / np.tanh(u)) / np.sinh(u) ** 2)
    assert abs(val - math.exp(-1)) < 1e-10
    assert abs(integrate_semi_infinite(lambda u: u * np.exp(-u * u / 2)) - 1) < 1e-12


def test_interval_reversed_and_empty():
    assert integrate_interval(np.cos, 0.0, 0.0) == 0.0
    assert abs(integrate_interval(np.cos, 1.0, 0.0) + math.sin(1.0)) < 1e-13


def test_subdivision_limit_reports_estimate():
    spec = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-300, max_subdivisions=8)
    with pytest.raises(QuadratureError) as ei:
        integrate_interval(lambda x: np.sin(1 / x), 1e-6, 1.0, spec)
    assert ei.value.n_intervals >= 8
    assert math.isfinite(ei.value.estimate)


def test_nonfinite_integrand():
    with pytest.raises(QuadratureError):
        integrate_interval(lambda x: np.full_like(x, np.nan), 0.0, 1.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    assert QuadratureSpec().halved().rel_tol == 5e-11


def test_log_gamma_examples():
    assert log_gamma(1.0) == 0.0
    assert abs(log_gamma(0.5) - 0.5723649429247001) < 1e-15
    x = 0.7
    dup = log_gamma(x) + log_gamma(x + 0.5) + (2 * x - 1) * math.log(2) - 0.5 * math.log(math.pi)
    assert abs(log_gamma(2 * x) - dup) < 1e-12
    with pytest.raises(DomainError):
        log_gamma(0.0)


def test_bessel_k_examples():
    assert abs(bessel_k(0.5, 1.0) - math.sqrt(math.pi / 2) * math.exp(-1)) < 1e-12
    assert abs(bessel_k(1.0, 1e-4) * 1e-4 - 1) < 1e-3
    zs = np.linspace(0.1, 20, 15)
    vals = [bessel_k(1.3, z) for z in zs]
    assert all(v > 0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 8.0), st.floats(1e-3, 60.0))
def test_bessel_k_matches_scipy(nu, z):
    ref = kv(nu, z)
    assert abs(bessel_k(nu, z) - ref) <= 1e-10 * ref


def test_bessel_k_domain():
    with pytest.raises(DomainError):
        bessel_k(0.0, 1.0)
    with pytest.raises(DomainError):
        bessel_k(1.0, -1.0)


def test_whittaker_examples():
    z = 1e-4
    v = whittaker_w(0.0, 1.0, z) * z ** 0.5 * math.exp(log_gamma(1.5) - log_gamma(2.0))
    assert abs(v - 1) < 1e-2
    lam = 1.0
    assert abs(whittaker_w(0.0, 1.0, 2 * lam) - math.sqrt(2 * lam / math.pi) * bessel_k(1.0, lam)) < 1e-8
    assert whittaker_w(0.2, 1.0, 50.0) < whittaker_w(0.2, 1.0, 10.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2.0, 1.0), st.floats(0.1, 3.0), st.floats(0.01, 40.0))
def test_whittaker_matches_mpmath(kappa, mu, z):
    if mu - kappa + 0.5 <= 0.05:
        return
    ref = float(mpmath.whitw(kappa, mu, z))
    assert abs(whittaker_w(kappa, mu, z) - ref) <= 1e-9 * abs(ref)


def test_whittaker_domain():
    with pytest.raises(DomainError):
        whittaker_w(2.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        whittaker_w(0.0, 1.0, 0.0)

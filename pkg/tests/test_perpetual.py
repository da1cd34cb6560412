import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import gamma

from hyperbm import perpetual as pp
from hyperbm.core import SimConfig
from hyperbm.harness import ks_two_sample
from hyperbm.special import DomainError, integrate_semi_infinite


def test_dufresne_examples():
    a = pp.sample_dufresne(2.0, 100_000, 3, seed=1)
    assert np.all(a > 0)
    assert abs(a.mean() - 0.5) < 4 * a.std(ddof=1) / math.sqrt(a.size)
    np.testing.assert_array_equal(a, pp.sample_dufresne(2.0, 100_000, 3, seed=1))


def test_dufresne_vs_paths():
    exact = pp.sample_dufresne(2.0, 10_000, 4, seed=2)
    path = pp.sample_perpetual(2.0, SimConfig(2, 1e-3, 10.0, 10_000), 5)
    assert path.horizon == 10.0
    assert ks_two_sample(exact, path.a_big).passed


def test_density_examples():
    for mu, f in ((1.0, pp.density_f1), (0.5, pp.density_f1), (2.0, pp.density_f2), (0.7, pp.density_f2)):
        assert abs(integrate_semi_infinite(lambda v: f(mu, v)) - 1) < 1e-8
    assert abs(pp.density_f1(0.5, 2.0) - math.exp(-1) / 2) < 1e-15
    assert abs(pp.density_f2(1.0, 0.5) - 2 * math.exp(-1)) < 1e-15


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 4.0), st.floats(0.05, 20.0))
def test_density_change_of_variables(mu, v):
    # a = 2 / γ_{2mu}  and  A = 1 / (2 γ_mu)
    g1 = gamma(2 * mu).pdf(2 / v) * 2 / v ** 2
    assert abs(pp.density_f1(mu, v) - g1) <= 1e-10 * max(g1, 1e-300)
    g2 = gamma(mu).pdf(0.5 / v) * 0.5 / v ** 2
    assert abs(pp.density_f2(mu, v) - g2) <= 1e-10 * max(g2, 1e-300)


def test_lambda_zero_limits():
    assert abs(pp.cond_laplace_given_a(1.0, 1e-6, 1.0) - pp.density_f1(1.0, 1.0)) < 1e-4
    assert abs(pp.cond_laplace_tilde(2.0, 1e-6, 1.0) - pp.density_f2(2.0, 1.0)) < 1e-10
    assert abs(pp.joint_laplace(1.0, 1e-5, 0.0) - 1) < 1e-3


def test_integral_identity_grid():
    for lam in (0.5, 1.0, 2.0):
        for kappa in (-1.0, -0.2, 0.0):
            for mu in (1.0,):
                val = integrate_semi_infinite(
                    lambda v: pp.cond_laplace_given_a(mu, lam, v) * np.exp(lam * kappa * v), scale=2.0)
                assert abs(val - pp.joint_laplace(mu, lam, kappa)) < 1e-8


@pytest.mark.parametrize("mu,lam", [(1.0, 1.0), (2.0, 0.5), (0.5, 3.0)])
def test_joint_laplace_kappa0_density_route(mu, lam):
    direct = integrate_semi_infinite(lambda v: np.exp(-0.5 * lam * lam * v) * pp.density_f2(mu, v))
    assert abs(direct - pp.joint_laplace(mu, lam, 0.0)) < 1e-8


@settings(max_examples=60, deadline=None)
@given(st.floats(0.2, 4.0), st.floats(0.05, 5.0), st.floats(-3.0, 0.0))
def test_joint_laplace_in_unit_interval(mu, lam, kappa):
    v = pp.joint_laplace(mu, lam, kappa)
    assert 0 < v <= 1 + 1e-12


def test_monotone_in_lambda():
    lams = np.linspace(0.1, 4, 12)
    for f, mu in ((pp.cond_laplace_given_a, 1.0), (pp.cond_laplace_tilde, 2.0)):
        vals = [f(mu, lam, 0.6) for lam in lams]
        assert all(a > b > 0 for a, b in zip(vals, vals[1:]))


def test_joint_laplace_mc():
    s = pp.sample_perpetual(1.0, SimConfig(3, 1e-3, 15.0, 20_000), 6)
    v = np.exp(-0.5 * s.a_big - 0.5 * s.a_small)
    assert abs(v.mean() - pp.joint_laplace(1.0, 1.0, -0.5)) < 4 * v.std(ddof=1) / math.sqrt(v.size)


def test_hitting_laplace_examples():
    assert pp.hitting_laplace_vz(1.0, 1.0, -0.5, 2.0, 2.0) == 1.0
    assert pp.hitting_laplace_vz(1.0, 1.0, -1.0, 1e-3, 1.0) < 1e-2
    with pytest.raises(DomainError):
        pp.hitting_laplace_vz(1.0, 1.0, 0.0, 3.0, 2.0)


def test_hitting_laplace_mc():
    hit = pp.sample_gbm_upward_hit(1.0, 1.0, 2.0, SimConfig(4, 1e-3, 40.0, 4000), 7)
    assert hit.hit.all()
    v = np.exp(-0.5 * hit.int_inv_sq)
    assert abs(v.mean() - pp.hitting_laplace_vz(1.0, 1.0, 0.0, 1.0, 2.0)) < 4 * v.std(ddof=1) / math.sqrt(v.size)


def test_domain_errors():
    with pytest.raises(DomainError):
        pp.sample_dufresne(0.0, 10, 0)
    with pytest.raises(DomainError):
        pp.joint_laplace(0.5, 1.0, 1.5)
    with pytest.raises(DomainError):
        pp.cond_laplace_tilde(1.0, -1.0, 1.0)


def test_upward_hit_time_unbiased_on_coarse_grid():
    m = 20_000
    hit = pp.sample_gbm_upward_hit(1.0, 1.0, 2.0, SimConfig(9, 1e-2, 40.0, m), 8)
    assert abs(hit.tau.mean() - math.log(2)) < 4 * hit.tau.std(ddof=1) / math.sqrt(m)

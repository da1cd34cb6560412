import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperbm import quat_space as qs
from hyperbm.core import SimConfig
from hyperbm.harness import empirical_charfn
from hyperbm.perpetual import rng_for

vals = st.floats(-3, 3)
heights = st.floats(0.1, 10)
xis = st.lists(st.floats(-5, 5), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-3)


def point(v, y):
    return qs.QuatPoint(v[0], y, v[1], v[2], v[3:7])


def test_dist_examples():
    z = qs.QuatPoint(0.1, 1.3, 0.2, -0.3, [0.1, 0.2, 0.3, 0.4])
    assert qs.dist_quat(z, z) == 0.0
    a = qs.QuatPoint(0.0, 1.0, 0.0, 0.0, np.zeros(4))
    b = qs.QuatPoint(0.0, math.e, 0.0, 0.0, np.zeros(4))
    assert abs(qs.dist_quat(a, b) - 1) < 1e-14


@settings(max_examples=200, deadline=None)
@given(st.lists(vals, min_size=21, max_size=21), heights, heights, heights)
def test_dist_metric_properties(v, y1, y2, y3):
    a, b, c = point(v[0:7], y1), point(v[7:14], y2), point(v[14:21], y3)
    dab = qs.dist_quat(a, b)
    assert math.isfinite(dab) and dab >= 0
    assert abs(dab - qs.dist_quat(b, a)) <= 1e-10 * max(1.0, dab)
    assert qs.dist_quat(a, c) <= dab + qs.dist_quat(b, c) + 1e-8


def test_twist_terms_do_not_depend_on_heights():
    a = qs.QuatPoint(0.1, 1.0, 0.2, -0.3, [0.1, 0.2, 0.3, 0.4])
    b = qs.QuatPoint(-0.4, 2.0, 0.5, 0.1, [0.3, -0.2, 0.0, 0.7])
    ph = qs.twist_terms(a.head, a.tilde, b.head, b.tilde)
    a2 = qs.QuatPoint(a.x1, 5.0, a.xn1, a.yn1, a.tilde)
    np.testing.assert_array_equal(ph, qs.twist_terms(a2.head, a2.tilde, b.head, b.tilde))
    assert np.all(qs.twist_terms(a.head, a.tilde, a.head, a.tilde) == 0)


def test_xi_axis_example_and_eigenvalues():
    X = qs.xi_matrix([1.0, 0.0, 0.0])
    expect = np.zeros((4, 4))
    expect[0, 1] = expect[2, 3] = 1.0
    expect -= expect.T
    np.testing.assert_array_equal(X, expect)
    xi = np.array([0.3, -1.2, 0.5])
    r2 = xi @ xi
    coeffs = np.poly(qs.xi_matrix(xi))
    np.testing.assert_allclose(coeffs, [1, 0, 2 * r2, 0, r2 * r2], atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(xis)
def test_skew_block_invariants(xi):
    sb = qs.build_skew_block(xi)
    np.testing.assert_allclose(sb.Q.T @ sb.Q, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(sb.Q.T @ sb.Xi @ sb.Q, sb.K, atol=1e-12 * max(1, np.linalg.norm(xi)))
    rng = np.random.default_rng(0)
    th, w = rng.normal(size=(2, 4)), rng.normal(size=(2, 4))
    lhs = np.sum(((th @ sb.Q) @ sb.K.T + w @ sb.Q) ** 2)
    assert abs(lhs - qs.twist_energy(xi, th, w)) < 1e-10 * max(1, lhs)


def test_skew_block_axis_uses_numeric_q():
    sb = qs.build_skew_block([1.0, 0.0, 0.0])
    assert sb.method == "numeric" and "printed_undefined" in sb.diagnostics
    assert qs.build_skew_block([0.2, 0.3, 0.4]).method == "printed"
    with pytest.raises(ValueError):
        qs.build_skew_block([0.0, 0.0, 0.0])


def test_kernel_examples():
    z0 = qs.QuatPoint(0.0, 1.0, 0.0, 0.0, np.zeros(4))
    v = qs.poisson_kernel_quat(2, np.zeros(7), z0)
    assert abs(v - 3072 / math.pi ** 4) < 1e-12
    pts = np.random.default_rng(1).normal(size=(100, 7)) * 3
    assert np.all(qs.poisson_kernel_quat(2, pts, z0) > 0)
    far = [qs.poisson_kernel_quat(2, np.full(7, s), z0) for s in (1.0, 10.0, 100.0)]
    assert far[0] > far[1] > far[2]


def test_sampler_matches_terminal_and_moments(backend):
    z0 = qs.QuatPoint(0.1, 0.9, 0.2, -0.1, [0.1, 0.2, 0.3, 0.4])
    cfg = SimConfig(5, 0.01, 1.0, 4)
    tr = qs.sample_quat_bm(z0, cfg, 6)
    np.testing.assert_array_equal(tr.head[:, 0], np.tile(z0.head, (4, 1)))
    term = qs.sample_quat_terminal(z0, cfg, 6)
    np.testing.assert_allclose(tr.head[:, -1], term.head, rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(tr.tilde[:, -1], term.tilde, rtol=1e-10, atol=1e-12)


def test_sampler_law_moments():
    n, T = 2, 2.0
    z0 = qs.QuatPoint(0.4, 1.0, 0.0, 0.0, np.zeros(4))
    term = qs.sample_quat_terminal(z0, SimConfig(3, 1e-2, T, 10_000), 9)
    assert abs(term.log_y.mean() + (2 * n + 1) * T) < 4 * math.sqrt(T / 1e4)
    assert abs(term.log_y.var(ddof=1) - T) < 4 * T * math.sqrt(2 / 9999)
    assert abs(term.head[:, 0].mean() - 0.4) < 4 * term.head[:, 0].std(ddof=1) / 100


def test_charfn_normalisation():
    z0 = qs.QuatPoint(0.4, 1.0, 0.1, 0.0, [0.2, 0.0, -0.1, 0.3])
    f = qs.QuatFreq([1e-4, 0.0, 0.0], np.zeros(4))
    assert abs(qs.limit_charfn_quat(2, f, z0) - 1) < 1e-3
    assert abs(qs.limit_charfn_quat(2, qs.QuatFreq(np.zeros(3), np.zeros(4)), z0) - 1) < 1e-12


@settings(max_examples=40, deadline=None)
@given(xis, st.lists(st.floats(-2, 2), min_size=4, max_size=4))
def test_charfn_forms_agree_and_conjugate(xi, w):
    z0 = qs.QuatPoint(0.4, 0.8, 0.1, 0.0, [0.2, 0.0, -0.1, 0.3])
    f = qs.QuatFreq(xi, w)
    v = qs.limit_charfn_quat(2, f, z0)
    assert abs(v - qs.limit_charfn_quat_u(2, f, z0)) < 1e-9
    assert abs(qs.limit_charfn_quat(2, -f, z0) - v.conjugate()) < 1e-12


def test_exact_sampler_matches_charfn():
    z0 = qs.QuatPoint(0.4, 0.8, 0.1, 0.0, [0.2, 0.0, -0.1, 0.3])
    pts = qs.sample_poisson_quat(2, z0, 100_000, rng_for(4, 1))
    for f in (qs.QuatFreq([1.0, 0, 0], np.zeros(4)), qs.QuatFreq([0.3, -0.5, 0.6], [0.2, 0, 0.1, -0.3]),
              qs.QuatFreq(np.zeros(3), [0.5, -0.5, 0, 0.3])):
        est = empirical_charfn(pts, f.vector())
        assert max(est.zscores(qs.limit_charfn_quat(2, f, z0))) < 4


@settings(max_examples=30, deadline=None)
@given(xis, st.integers(0, 2**32 - 1))
def test_charfn_rotation_invariant_without_twist(xi, seed):
    z0 = qs.QuatPoint(0.0, 1.3, 0.0, 0.0, np.zeros(4))
    q, _ = np.linalg.qr(np.random.default_rng(seed).normal(size=(3, 3)))
    a = qs.limit_charfn_quat(2, qs.QuatFreq(xi, np.zeros(4)), z0)
    b = qs.limit_charfn_quat(2, qs.QuatFreq(q @ np.asarray(xi), np.zeros(4)), z0)
    assert abs(a - b) < 1e-12

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperbm import complex_space as cs
from hyperbm.core import SimConfig
from hyperbm.harness import StudentTProposal, empirical_charfn, mc_integrate
from hyperbm.perpetual import rng_for

vals = st.floats(-3, 3)
heights = st.floats(0.1, 10)


def point(v, y):
    return cs.ComplexPoint(v[0], y, v[1:])


def test_dist_examples():
    z = cs.ComplexPoint(0.3, 1.1, [0.2, -0.4])
    assert cs.dist_complex(z, z) == 0.0
    a = cs.ComplexPoint(0.0, 1.0, [0.0, 0.0])
    b = cs.ComplexPoint(0.0, math.e, [0.0, 0.0])
    assert abs(cs.dist_complex(a, b) - 1) < 1e-14


@settings(max_examples=200, deadline=None)
@given(st.lists(vals, min_size=9, max_size=9), heights, heights, heights)
def test_dist_metric_properties(v, y1, y2, y3):
    a, b, c = point(v[0:3], y1), point(v[3:6], y2), point(v[6:9], y3)
    dab = cs.dist_complex(a, b)
    assert math.isfinite(dab) and dab >= 0
    assert abs(dab - cs.dist_complex(b, a)) <= 1e-10 * max(1.0, dab)
    assert cs.dist_complex(a, c) <= dab + cs.dist_complex(b, c) + 1e-8
    big_phi = y2 ** 2 + np.sum((b.tilde - a.tilde) ** 2)
    phi = cs.phi_pair(a.x1, a.tilde, b.x1, b.tilde)
    cosh_sq = ((y1 ** 2 + big_phi) ** 2 + 4 * phi ** 2) / (4 * y1 ** 2 * y2 ** 2)
    assert cosh_sq >= 1 - 1e-12
    assert abs(math.cosh(dab) ** 2 - cosh_sq) <= 1e-8 * cosh_sq


def test_point_validation():
    with pytest.raises(ValueError):
        cs.ComplexPoint(0.0, 1.0, [0.0])
    with pytest.raises(ValueError):
        cs.ComplexPoint(0.0, -1.0, [0.0, 0.0])
    with pytest.raises(ValueError):
        cs.dist_complex(cs.ComplexPoint(0, 1, [0, 0]), cs.ComplexPoint(0, 1, [0, 0, 0, 0]))


def test_sampler_starts_at_z0_and_matches_terminal(backend):
    z0 = cs.ComplexPoint(0.2, 0.8, [0.1, -0.3, 0.5, 0.0])
    cfg = SimConfig(5, 0.01, 1.0, 4)
    tr = cs.sample_complex_bm(z0, cfg, 6)
    assert np.all(tr.x1[:, 0] == 0.2) and np.all(tr.tilde[:, 0] == z0.tilde)
    term = cs.sample_complex_terminal(z0, cfg, 6)
    np.testing.assert_allclose(tr.x1[:, -1], term.x1, rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(tr.tilde[:, -1], term.tilde, rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(tr.log_y[:, -1], term.log_y, rtol=1e-10)


def test_sampler_moments():
    n, T = 2, 4.0
    z0 = cs.ComplexPoint(0.5, 1.0, [0.3, -0.2])
    term = cs.sample_complex_terminal(z0, SimConfig(3, 1e-2, T, 10_000), 7)
    assert abs(term.log_y.mean() + n * T) < 4 * math.sqrt(T / 1e4)
    assert abs(term.log_y.var(ddof=1) - T) < 4 * T * math.sqrt(2 / 9999)
    cols = term.boundary()
    for j, x0 in enumerate(z0.boundary()):
        assert abs(cols[:, j].mean() - x0) < 4 * cols[:, j].std(ddof=1) / 100


def test_kernel_examples():
    z0 = cs.ComplexPoint(0.0, 1.0, [0.0, 0.0])
    assert abs(cs.poisson_kernel_complex(2, 0.0, [0.0, 0.0], z0) - 8 / math.pi ** 2) < 1e-14
    far = [cs.poisson_kernel_complex(2, s, [s, s], z0) for s in (1.0, 10.0, 100.0)]
    assert far[0] > far[1] > far[2] > 0 and far[2] < 1e-12


def test_kernel_normalization_mc():
    z0 = cs.ComplexPoint(0.3, 1.2, [0.1, -0.2])
    prop = StudentTProposal(3, dof=1.0, scale=1.2, loc=tuple(z0.boundary()))
    est = mc_integrate(lambda x: cs.poisson_kernel_complex(2, x[:, 0], x[:, 1:], z0), prop, 200_000, 3)
    assert abs(est.value - 1) < max(0.01, 4 * est.se)


def test_charfn_at_zero_and_small_p():
    z0 = cs.ComplexPoint(0.3, 1.2, [0.1, -0.2, 0.4, 0.0])
    assert abs(cs.limit_charfn_complex(3, cs.ComplexFreq(0.0, [0, 0], [0, 0]), z0) - 1) < 1e-12
    assert abs(cs.limit_charfn_complex(3, cs.ComplexFreq(1e-6, [0, 0], [0, 0]), z0) - 1) < 1e-5


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3).filter(lambda p: abs(p) > 1e-2), st.lists(st.floats(-2, 2), min_size=4, max_size=4))
def test_charfn_forms_agree_and_conjugate(p, qr):
    z0 = cs.ComplexPoint(0.3, 0.9, [0.2, -0.1])
    f = cs.ComplexFreq(p, qr[0:1], qr[1:2])
    v = cs.limit_charfn_complex(2, f, z0)
    assert abs(v - cs.limit_charfn_complex_u(2, f, z0)) < 1e-9
    assert abs(cs.limit_charfn_complex(2, -f, z0) - v.conjugate()) < 1e-12
    assert abs(v) <= 1 + 1e-12


def test_exact_sampler_matches_charfn():
    z0 = cs.ComplexPoint(0.3, 0.9, [0.2, -0.1])
    x1, tp = cs.sample_poisson_complex(2, z0, 100_000, rng_for(2, 5))
    pts = np.column_stack([x1, tp])
    for f in (cs.ComplexFreq(1.0, [0.5], [-0.5]), cs.ComplexFreq(0.0, [0.8], [0.2]),
              cs.ComplexFreq(-2.0, [0.0], [0.3])):
        est = empirical_charfn(pts, f.vector())
        assert max(est.zscores(cs.limit_charfn_complex(2, f, z0))) < 4

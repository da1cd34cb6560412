"""Verification campaigns: each returns a list of ``TestReport``.

Default arguments reproduce the acceptance settings.  Stream ids are fixed
per campaign so that independent checks never share noise.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from . import complex_space as cs
from . import perpetual as pp
from . import quat_space as qs
from . import real_space as rs
from .core import SimConfig, levy_area_charfn
from .harness import (StudentTProposal, TestReport, charfn_report, empirical_charfn, ks_one_sample,
                      ks_two_sample, mc_integrate, mean_report, tolerance_report)
from .special import DEFAULT_SPEC, bessel_k, integrate_semi_infinite, log_gamma

DT = 1e-3

# stream ids
S_CLT = 11
S_LIMIT = 21
S_LIMIT_2T = 22
S_HIT = 31
S_DUFRESNE_EXACT = 41
S_DUFRESNE_PATH = 42
S_JOINT = 51
S_VZ = 61
S_FOURIER_MC = 71
S_NORM_MC = 81
S_EXACT_KERNEL = 91


def default_point(space, n):
    if space == "real":
        return rs.RealPoint(np.zeros(n), 1.0)
    if space == "complex":
        return cs.ComplexPoint(0.0, 1.0, np.zeros(2 * (n - 1)))
    if space == "quaternionic":
        return qs.QuatPoint(0.0, 1.0, 0.0, 0.0, np.zeros(4 * (n - 1)))
    raise ValueError(f"unknown space {space!r}")


def drift(space, n):
    return {"real": 0.5 * n, "complex": float(n), "quaternionic": 2.0 * n + 1.0}[space]


def terminal(space, z0, cfg, stream):
    if space == "real":
        return rs.sample_real_terminal(z0, cfg, stream)
    if space == "complex":
        return cs.sample_complex_terminal(z0, cfg, stream)
    return qs.sample_quat_terminal(z0, cfg, stream)


def terminal_distance(space, z0, term):
    if space == "real":
        return rs.dist_real_log(z0.x, math.log(z0.y), term.x, term.log_y)
    if space == "complex":
        return cs.dist_complex_log(z0.x1, math.log(z0.y), z0.tilde, term.x1, term.log_y, term.tilde)
    return qs.dist_quat_log(z0.head, math.log(z0.y), z0.tilde, term.head, term.log_y, term.tilde)


def terminal_boundary(space, term):
    return term.x if space == "real" else term.boundary()


def clt_campaign(space="real", n=2, T=50.0, dt=DT, samples=10_000, seed=7, n_workers=None):
    """Radial CLT: (d(Z(T), Z(0)) - mu T) / sqrt(T) against N(0, 1).

    Besides the KS and mean checks, ``details`` records the mean of the
    radial remainder ``d - (log y - log Y(T))``, which carries the finite-T
    offset of the centred distance.
    """
    z0 = default_point(space, n)
    mu = drift(space, n)
    cfg = SimConfig(seed, dt, T, samples, n_workers)
    term = terminal(space, z0, cfg, S_CLT)
    d = terminal_distance(space, z0, term)
    zs = (d - mu * T) / math.sqrt(T)
    remainder = d - (math.log(z0.y) - term.log_y)
    ks = ks_one_sample(zs, ndtr, name=f"clt_{space}_n{n}_ks")
    tol = 4.0 / math.sqrt(samples)
    m = float(zs.mean())
    mean_rep = TestReport(f"clt_{space}_n{n}_mean", abs(m), tol, samples, abs(m) <= tol,
                          {"mean": m, "var": float(zs.var(ddof=1))})
    extra = {"T": T, "dt": cfg.step, "remainder_mean": float(remainder.mean()),
             "remainder_offset_over_sqrtT": float(remainder.mean() / math.sqrt(T)),
             "mean_minus_offset": float(m - remainder.mean() / math.sqrt(T))}
    ks.details.update(extra)
    mean_rep.details.update(extra)
    return [ks, mean_rep]


COMPLEX_FREQS = [
    (1.0, [0.5], [-0.5]),
    (0.5, [0.0], [0.0]),
    (0.0, [0.7], [0.3]),
    (-1.5, [0.2], [0.4]),
    (2.0, [-1.0], [0.5]),
]

QUAT_FREQS = [
    ([1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]),
    ([0.3, -0.5, 0.6], [0.2, 0.0, 0.1, -0.3]),
    ([0.0, 0.0, 0.8], [0.0, 0.0, 0.0, 0.0]),
    ([0.0, 0.0, 0.0], [0.5, -0.5, 0.0, 0.3]),
    ([-0.7, 0.4, 0.2], [0.0, 0.6, 0.0, 0.0]),
]


def _stability(space, name, b1, b2):
    reps = []
    for j in range(b1.shape[1]):
        reps.append(ks_two_sample(b1[:, j], b2[:, j], name=f"{name}_coord{j}"))
    return reps


def limit_law_campaign(space="real", n=None, T=None, dt=DT, samples=10_000, seed=7, n_workers=None,
                       stability=True):
    """Boundary limit law of the horizontal coordinates."""
    reps = []
    if space == "real":
        n = 1 if n is None else n
        T = 30.0 if T is None else T
        z0 = rs.RealPoint(np.zeros(n), 1.0)
        cfg = SimConfig(seed, dt, T, samples, n_workers)
        term = rs.sample_real_terminal(z0, cfg, S_LIMIT)
        if n == 1:
            reps.append(ks_one_sample(term.x[:, 0], lambda v: rs.cauchy_cdf(v, z0.x[0], z0.y),
                                      name="limit_real_n1_cauchy_ks"))
        else:
            ref = rs.sample_poisson_real(n, z0, samples, pp.rng_for(seed, S_EXACT_KERNEL))
            reps += _stability(space, f"limit_real_n{n}_vs_kernel", term.x, ref)
        if stability:
            term2 = rs.sample_real_terminal(z0, cfg.with_(horizon=T / 2), S_LIMIT_2T)
            reps += _stability(space, f"limit_real_n{n}_T{T / 2:g}_vs_T{T:g}", term2.x, term.x)
        return reps

    n = 2 if n is None else n
    if space == "complex":
        T = 20.0 if T is None else T
        z0 = default_point(space, n)
        cfg = SimConfig(seed, dt, T, samples, n_workers)
        term = cs.sample_complex_terminal(z0, cfg, S_LIMIT)
        bd = term.boundary()
        for i, (p, q, r) in enumerate(COMPLEX_FREQS):
            f = cs.ComplexFreq(p, np.resize(q, n - 1), np.resize(r, n - 1))
            target = cs.limit_charfn_complex(n, f, z0)
            reps.append(charfn_report(f"limit_complex_n{n}_cf{i}", empirical_charfn(bd, f.vector()),
                                      target, samples))
        rng = pp.rng_for(seed, S_EXACT_KERNEL)
        x1p, tp = cs.sample_poisson_complex(n, z0, samples, rng)
        reps += _stability(space, f"limit_complex_n{n}_vs_kernel", bd, np.column_stack([x1p, tp]))
    elif space == "quaternionic":
        T = 10.0 if T is None else T
        z0 = default_point(space, n)
        cfg = SimConfig(seed, dt, T, samples, n_workers)
        term = qs.sample_quat_terminal(z0, cfg, S_LIMIT)
        bd = term.boundary()
        for i, (xi, w) in enumerate(QUAT_FREQS):
            f = qs.QuatFreq(xi, np.resize(w, 4 * (n - 1)))
            target = qs.limit_charfn_quat(n, f, z0)
            reps.append(charfn_report(f"limit_quat_n{n}_cf{i}", empirical_charfn(bd, f.vector()),
                                      target, samples))
        ref = qs.sample_poisson_quat(n, z0, samples, pp.rng_for(seed, S_EXACT_KERNEL))
        reps += _stability(space, f"limit_quat_n{n}_vs_kernel", bd, ref)
    else:
        raise ValueError(f"unknown space {space!r}")
    if stability:
        cfg2 = cfg.with_(horizon=2 * T)
        term2 = terminal(space, z0, cfg2, S_LIMIT_2T)
        reps += _stability(space, f"limit_{space}_n{n}_T{T:g}_vs_T{2 * T:g}", bd, term2.boundary())
    return reps


def numeric_fourier_p4(lam_norm, count=1_000_000, seed=7, replicates=16):
    """3-d Fourier transform of ``p_4(., 1)`` at ``(|λ|, 0, 0)`` by randomised QMC."""
    prop = StudentTProposal(3, dof=2.0, scale=1.0)
    lam = np.array([lam_norm, 0.0, 0.0])

    def f(x):
        return np.cos(x @ lam) * rs.poisson_kernel_real(3, x, 1.0)

    return mc_integrate(f, prop, count, S_FOURIER_MC, seed, qmc_replicates=replicates)


def complex_kernel_ft(freq, z0, count=400_000, seed=7, replicates=16):
    """Real and imaginary parts of the Fourier transform of the complex kernel by randomised QMC."""
    n = z0.n
    prop = StudentTProposal(2 * n - 1, dof=1.0, scale=z0.y, loc=tuple(z0.boundary()))
    v = freq.vector()

    def kern(x):
        return cs.poisson_kernel_complex(n, x[:, 0], x[:, 1:], z0)

    re = mc_integrate(lambda x: np.cos(x @ v) * kern(x), prop, count, S_FOURIER_MC, seed, replicates)
    im = mc_integrate(lambda x: np.sin(x @ v) * kern(x), prop, count, S_FOURIER_MC, seed, replicates)
    return re, im


def fourier_identity_reports(seed=7, mc_points=1_000_000):
    """Closed-form Fourier transforms of p_3 (Hankel quadrature) and p_4 (randomised QMC)."""
    reps = []
    for lam in (0.5, 1.0, 2.0):
        num = rs.numeric_fourier_p3(lam, 1.0)
        reps.append(tolerance_report(f"fourier_p3_lam{lam:g}", num, lam * bessel_k(1.0, lam), 1e-4))
        reps[-1].details["closed_form"] = rs.fourier_real(2, [lam, 0.0], 1.0)
    est = numeric_fourier_p4(1.0, mc_points, seed)
    rep = tolerance_report("fourier_p4_lam1", est.value, 2.0 * math.exp(-1.0), 1e-3)
    rep.details.update(se=est.se, ess=est.ess, n_points=est.count)
    rep.n_used = est.count
    reps.append(rep)
    return reps


def kernel_charfn_reports(seed=7, count=400_000):
    """Complex kernel (n = 2) against its characteristic function at 5 random frequencies."""
    reps = []
    z0 = cs.ComplexPoint(0.2, 1.0, [0.3, -0.1])
    rng = np.random.default_rng(seed)
    for i in range(5):
        p, q, r = rng.uniform(-1.5, 1.5, 3)
        f = cs.ComplexFreq(p, [q], [r])
        target = cs.limit_charfn_complex(2, f, z0)
        re, im = complex_kernel_ft(f, z0, count, seed=seed + i)
        z = max(abs(re.value - target.real) / re.se, abs(im.value - target.imag) / im.se)
        reps.append(TestReport(f"fourier_complex_kernel_cf{i}", z, 4.0, re.count, z <= 4.0,
                               {"freq": [p, q, r], "mc": [re.value, im.value], "se": [re.se, im.se],
                                "target": [target.real, target.imag]}))
    return reps


def hitting_charfn_reports(seed=7, dt=DT, samples=10_000, n_workers=None):
    """First passage of Y below a = 1/2 from y = 1 (n = 3, λ = (1, 0, 0))."""
    z0r = rs.RealPoint(np.zeros(3), 1.0)
    a = 0.5
    lam = np.array([1.0, 0.0, 0.0])
    cfg = SimConfig(seed, dt, 40.0, samples, n_workers)
    hs = rs.sample_real_hitting(z0r, a, cfg, S_HIT)
    target = rs.hitting_charfn(3, lam, z0r, a)
    rep = charfn_report("hitting_charfn_n3", empirical_charfn(hs.x[hs.hit], lam), target, int(hs.hit.sum()))
    rep.details["unhit"] = int((~hs.hit).sum())
    rep.passed = rep.passed and rep.details["unhit"] == 0
    return [rep]


def fourier_campaign(seed=7, dt=DT, samples=10_000, n_workers=None, mc_points=1_000_000):
    return (fourier_identity_reports(seed, mc_points) + kernel_charfn_reports(seed)
            + hitting_charfn_reports(seed, dt, samples, n_workers))


def dufresne_reports(seed=7, dt=DT, count=10_000, n_workers=None):
    reps = []
    for mu in (0.5, 1.0, 2.0):
        exact = pp.sample_dufresne(mu, count, S_DUFRESNE_EXACT, seed)
        path = pp.sample_perpetual(mu, SimConfig(seed, dt, 15.0 / mu, count, n_workers), S_DUFRESNE_PATH)
        reps.append(ks_two_sample(exact, path.a_big, name=f"dufresne_mu{mu:g}"))
    return reps


def transform_reports(seed=7, dt=DT, n_joint=100_000, n_workers=None):
    """Joint Laplace transform by MC, the conditional-transform integral identity and λ -> 0 limits."""
    reps = []
    paths = {}
    for mu, lam, kappa in ((1.0, 1.0, -0.5), (2.0, 0.5, 0.0), (1.0, 2.0, -1.0)):
        if mu not in paths:
            paths[mu] = pp.sample_perpetual(mu, SimConfig(seed, dt, 15.0 / mu, n_joint, n_workers), S_JOINT)
        s = paths[mu]
        vals = np.exp(-0.5 * lam * lam * s.a_big + lam * kappa * s.a_small)
        reps.append(mean_report(f"joint_laplace_mc_mu{mu:g}_lam{lam:g}_kappa{kappa:g}", vals,
                                pp.joint_laplace(mu, lam, kappa)))

    for mu, lam, kappa in ((1.0, 1.0, -0.2), (1.0, 0.5, 0.0), (2.0, 1.5, -1.0), (0.5, 2.0, 0.3)):
        lhs = integrate_semi_infinite(
            lambda v: pp.cond_laplace_given_a(mu, lam, v) * np.exp(lam * kappa * v), DEFAULT_SPEC,
            scale=2.0 / (lam * (2 * mu + 1 - 2 * kappa)) + 1.0)
        reps.append(tolerance_report(f"joint_integral_mu{mu:g}_lam{lam:g}_kappa{kappa:g}", lhs,
                                     pp.joint_laplace(mu, lam, kappa), 1e-8))

    reps.append(tolerance_report("joint_lambda0_limit_f1", pp.cond_laplace_given_a(1.0, 1e-6, 1.0),
                                 pp.density_f1(1.0, 1.0), 1e-4))
    reps.append(tolerance_report("cor_lambda0_limit_f2", pp.cond_laplace_tilde(2.0, 1e-6, 1.0),
                                 pp.density_f2(2.0, 1.0), 1e-4))

    # binned conditional check of the Ã | A transform (loose, conditioning bias is O(delta))
    s = paths[2.0]
    v, delta, lam = 0.25, 0.01, 1.0
    sel = np.abs(s.a_big - v) < delta
    est = float(np.mean(np.exp(-0.5 * lam * lam * s.a_tilde[sel]))) * pp.density_f2(2.0, v)
    rep = tolerance_report("cor_binned_mc", est, pp.cond_laplace_tilde(2.0, lam, v), 0.10, relative=True)
    rep.details["bin_count"] = int(sel.sum())
    rep.passed = rep.passed and sel.sum() >= 500
    reps.append(rep)
    return reps


def upward_hit_reports(seed=7, dt=DT, count=10_000, n_workers=None):
    cfg = SimConfig(seed, dt, 40.0, count, n_workers)
    hit = pp.sample_gbm_upward_hit(1.0, 1.0, 2.0, cfg, S_VZ)
    vals = np.exp(-0.5 * hit.int_inv_sq[hit.hit])
    rep = mean_report("hitting_laplace_vz_mc", vals, pp.hitting_laplace_vz(1.0, 1.0, 0.0, 1.0, 2.0))
    rep.details["unhit"] = int((~hit.hit).sum())
    rep.passed = rep.passed and rep.details["unhit"] == 0
    return [rep]


def appendix_campaign(seed=7, dt=DT, n_dufresne=10_000, n_joint=100_000, n_hit=10_000, n_workers=None):
    return (dufresne_reports(seed, dt, n_dufresne, n_workers) + transform_reports(seed, dt, n_joint, n_workers)
            + upward_hit_reports(seed, dt, n_hit, n_workers))


def skew_campaign(count=100, seed=7):
    rng = np.random.default_rng(seed)
    xis = [rng.normal(size=3) for _ in range(count - 6)]
    xis += [np.array(v, dtype=float) for v in
            ([1, 0, 0], [0, 1, 0], [0, 0, 1], [-2, 0, 0], [0, 3, -1], [1, 1e-9, 0])]
    worst_orth = worst_conj = worst_f = 0.0
    methods = {"printed": 0, "numeric": 0}
    for xi in xis:
        sb = qs.build_skew_block(xi)
        methods[sb.method] += 1
        worst_orth = max(worst_orth, float(np.max(np.abs(sb.Q.T @ sb.Q - np.eye(4)))))
        worst_conj = max(worst_conj, float(np.max(np.abs(sb.Q.T @ sb.Xi @ sb.Q - sb.K))))
        th = rng.normal(size=(3, 4))
        w = rng.normal(size=(3, 4))
        lhs = float(np.sum((th @ sb.Q @ sb.K.T + w @ sb.Q) ** 2))
        rhs = qs.twist_energy(xi, th, w)
        worst_f = max(worst_f, abs(lhs - rhs) / max(1.0, rhs))
    return [
        TestReport("skew_orthogonality", worst_orth, 1e-12, len(xis), worst_orth <= 1e-12, dict(methods)),
        TestReport("skew_conjugation", worst_conj, 1e-12, len(xis), worst_conj <= 1e-12, dict(methods)),
        TestReport("skew_f_invariance", worst_f, 1e-12, len(xis), worst_f <= 1e-12, {}),
    ]


def normalization_campaign(seed=7, mc_points=1_000_000):
    reps = []
    for n in (1, 2, 3):
        area = 2.0 * math.pi ** (0.5 * n) / math.exp(log_gamma(0.5 * n))

        def radial(r, n=n, area=area):
            pts = np.zeros(r.shape + (n,))
            pts[..., 0] = r
            return area * r ** (n - 1) * rs.poisson_kernel_real(n, pts, 1.0)

        val = integrate_semi_infinite(radial)
        reps.append(tolerance_report(f"norm_real_p{n + 1}", val, 1.0, 1e-8))
    z0 = cs.ComplexPoint(0.0, 1.0, [0.0, 0.0])
    prop = StudentTProposal(3, dof=1.0, scale=1.0)
    est = mc_integrate(lambda x: cs.poisson_kernel_complex(2, x[:, 0], x[:, 1:], z0), prop, mc_points,
                       S_NORM_MC, seed)
    rep = tolerance_report("norm_complex_f2_mc", est.value, 1.0, 0.01, relative=True)
    rep.details.update(se=est.se, ess=est.ess)
    rep.n_used = est.count
    reps.append(rep)
    return reps


S_LEVY = 101


def levy_charfn_mc(b=1.0, t=1.0, count=200_000, steps=400, seed=7, bins=((0.0, 0.5), (1.5, 2.5))):
    """Binned MC check of ``levy_area_charfn`` for one planar Brownian motion."""
    from .core import _bm_grid, levy_area
    reps = []
    cfg = SimConfig(seed, t / steps, t, count)
    areas, r2 = [], []
    for lo in range(0, count, 20_000):
        w = _bm_grid(cfg, 2, S_LEVY, np.arange(lo, min(count, lo + 20_000)))
        areas.append(levy_area(w[:, 0], w[:, 1]))
        r2.append(w[:, 0, -1] ** 2 + w[:, 1, -1] ** 2)
    areas = np.concatenate(areas)
    r2 = np.concatenate(r2)
    for lo, hi in bins:
        sel = (r2 >= lo) & (r2 < hi)
        est = empirical_charfn(2.0 * areas[sel], [b])
        target = float(np.mean(levy_area_charfn(b, t, r2[sel], 1)))
        reps.append(charfn_report(f"levy_charfn_bin_{lo:g}_{hi:g}", est, target, int(sel.sum())))
    return reps


def _arrays(obj):
    if isinstance(obj, np.ndarray):
        return [obj]
    return [v for v in vars(obj).values() if isinstance(v, np.ndarray)]


def determinism_campaign(seed=7):
    """Every batch sampler twice with 1 worker and once with 3: results must be bit-identical."""
    reps = []
    cfg1 = SimConfig(seed, 1e-2, 2.0, 64, n_workers=1)
    cfg3 = cfg1.with_(n_workers=3)
    zr = rs.RealPoint([0.1, -0.2], 1.3)
    zc = cs.ComplexPoint(0.1, 0.9, [0.2, 0.3])
    zq = qs.QuatPoint(0.1, 0.9, 0.2, -0.1, [0.1, 0.2, 0.3, 0.4])
    jobs = {
        "real_terminal": lambda c: rs.sample_real_terminal(zr, c, 5),
        "complex_terminal": lambda c: cs.sample_complex_terminal(zc, c, 5),
        "quat_terminal": lambda c: qs.sample_quat_terminal(zq, c, 5),
        "exp_functionals": lambda c: pp.sample_perpetual(1.0, c, 5),
        "real_hitting": lambda c: rs.sample_real_hitting(zr, 0.7, c, 5),
        "radial_sde": lambda c: rs.sample_radial_sde(2, 0.3, 1.0, c, 5),
        "gbm_upward_hit": lambda c: pp.sample_gbm_upward_hit(1.0, 1.0, 1.5, c, 5),
    }
    for name, job in jobs.items():
        a, b, c = (_arrays(job(cfg)) for cfg in (cfg1, cfg1, cfg3))
        same = all(np.array_equal(x, y, equal_nan=True) and np.array_equal(x, z, equal_nan=True)
                   for x, y, z in zip(a, b, c))
        reps.append(TestReport(f"determinism_{name}", float(not same), 0.0, cfg1.n_samples, same, {}))
    return reps

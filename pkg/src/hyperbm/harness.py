"""Goodness-of-fit tests, Monte Carlo estimators and JSON reports."""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

ALPHA = 0.01
N_SE = 4.0


@dataclass
class TestReport:
    """Outcome of one named check; ``passed`` is the decision rule's verdict."""

    __test__ = False  # not a pytest class

    name: str
    statistic: float
    threshold_or_pvalue: float
    n_used: int
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: stat={self.statistic:.6g} ref={self.threshold_or_pvalue:.6g} n={self.n_used}"

    def to_dict(self):
        d = asdict(self)
        d["passed"] = bool(d["passed"])
        return d


def kolmogorov_sf(x, terms=100) -> float:
    """Asymptotic Kolmogorov survival function ``2 Σ (-1)^{k-1} e^{-2 k^2 x^2}``."""
    x = float(x)
    if x <= 0.0:
        return 1.0
    if x < 0.2:
        # the alternating series converges badly here; the true value is 1 to double precision
        return 1.0
    k = np.arange(1, terms + 1)
    s = 2.0 * np.sum((-1.0) ** (k - 1) * np.exp(-2.0 * k * k * x * x))
    return float(min(1.0, max(0.0, s)))


def ks_one_sample(samples, cdf, name="ks_one_sample", min_samples=20) -> TestReport:
    """One-sample Kolmogorov-Smirnov test with the asymptotic p-value (pass iff p > 0.01).

    ``min_samples`` can be lowered for hand-sized checks of the statistic.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    m = x.size
    if m < min_samples:
        raise ValueError(f"need at least {min_samples} samples, got {m}")
    u = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, m + 1)
    d = float(max(np.max(i / m - u), np.max(u - (i - 1) / m)))
    p = kolmogorov_sf(math.sqrt(m) * d)
    return TestReport(name, d, p, m, p > ALPHA, {"alpha": ALPHA, "test": "ks1"})


def ks_two_sample(a, b, name="ks_two_sample", min_samples=20) -> TestReport:
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size < min_samples or b.size < min_samples:
        raise ValueError(f"need at least {min_samples} samples in each group")
    allv = np.concatenate([a, b])
    fa = np.searchsorted(a, allv, side="right") / a.size
    fb = np.searchsorted(b, allv, side="right") / b.size
    d = float(np.max(np.abs(fa - fb)))
    en = math.sqrt(a.size * b.size / (a.size + b.size))
    p = kolmogorov_sf(en * d)
    return TestReport(name, d, p, int(a.size + b.size), p > ALPHA,
                      {"alpha": ALPHA, "test": "ks2", "n_a": int(a.size), "n_b": int(b.size)})


@dataclass
class CharFnEstimate:
    value: complex
    se_real: float
    se_imag: float

    def zscores(self, target: complex):
        d = self.value - complex(target)
        zr = abs(d.real) / self.se_real if self.se_real > 0 else (0.0 if d.real == 0 else math.inf)
        zi = abs(d.imag) / self.se_imag if self.se_imag > 0 else (0.0 if d.imag == 0 else math.inf)
        return zr, zi


def empirical_charfn(samples, freq, min_samples=100) -> CharFnEstimate:
    """Mean of ``exp(i <freq, x>)`` with componentwise standard errors."""
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] < min_samples:
        raise ValueError(f"need at least {min_samples} samples")
    ph = x @ np.atleast_1d(np.asarray(freq, dtype=float))
    c, s = np.cos(ph), np.sin(ph)
    m = x.shape[0]
    return CharFnEstimate(complex(c.mean(), s.mean()),
                          float(c.std(ddof=1) / math.sqrt(m)), float(s.std(ddof=1) / math.sqrt(m)))


def charfn_report(name, est: CharFnEstimate, target: complex, n, k=N_SE) -> TestReport:
    zr, zi = est.zscores(target)
    z = max(zr, zi)
    return TestReport(name, z, k, n, z <= k,
                      {"empirical": [est.value.real, est.value.imag],
                       "target": [complex(target).real, complex(target).imag],
                       "se": [est.se_real, est.se_imag]})


def mean_report(name, values, target, k=N_SE) -> TestReport:
    v = np.asarray(values, dtype=float)
    se = float(v.std(ddof=1) / math.sqrt(v.size))
    z = abs(float(v.mean()) - target) / se if se > 0 else 0.0
    return TestReport(name, z, k, int(v.size), z <= k,
                      {"mean": float(v.mean()), "target": float(target), "se": se})


def tolerance_report(name, value, target, tol, relative=False) -> TestReport:
    err = abs(value - target)
    if relative:
        err /= abs(target)
    return TestReport(name, float(err), float(tol), 1, bool(err <= tol),
                      {"value": float(value), "target": float(target), "relative": relative})


class DegenerateWeights(RuntimeError):
    pass


@dataclass(frozen=True)
class StudentTProposal:
    """Radially symmetric multivariate t proposal in ``dim`` dimensions."""

    dim: int
    dof: float = 2.0
    scale: float = 1.0
    loc: tuple = ()

    def _loc(self):
        return np.zeros(self.dim) if not self.loc else np.asarray(self.loc, dtype=float)

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        d, nu, s = self.dim, self.dof, self.scale
        r2 = np.sum(((x - self._loc()) / s) ** 2, axis=-1)
        return (math.lgamma(0.5 * (nu + d)) - math.lgamma(0.5 * nu) - 0.5 * d * math.log(nu * math.pi)
                - d * math.log(s) - 0.5 * (nu + d) * np.log1p(r2 / nu))

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def from_uniform(self, u):
        """Map uniforms of shape (count, dim + 1) to proposal draws (inverse-CDF route)."""
        from scipy.special import gammaincinv
        g = ndtri(u[:, :self.dim])
        chi2 = 2.0 * gammaincinv(0.5 * self.dof, u[:, self.dim])
        return self._loc() + self.scale * g * np.sqrt(self.dof / chi2)[:, None]

    def sample(self, rng, count):
        g = rng.standard_normal((count, self.dim))
        chi2 = rng.chisquare(self.dof, count)
        return self._loc() + self.scale * g * np.sqrt(self.dof / chi2)[:, None]


@dataclass
class MCEstimate:
    value: float
    se: float
    ess: float
    count: int


def mc_integrate(f, proposal: StudentTProposal, count, stream_id, seed=0, qmc_replicates=0,
                 min_ess_fraction=0.01) -> MCEstimate:
    """Importance-sampling estimate of ``∫ f`` over R^d.

    With ``qmc_replicates = R > 1`` the points are split into R independently
    scrambled Sobol' sets (each rounded up to a power of two, so at least
    ``count`` points are used) and the standard error comes from the spread of
    the replicate means.
    """
    from .perpetual import rng_for
    rng = rng_for(seed, stream_id, tag=17)
    if qmc_replicates and qmc_replicates > 1:
        # Sobol' balance needs a power-of-two length, so round the per-replicate size up
        per = 1 << max(1, math.ceil(math.log2(max(2, int(count) // int(qmc_replicates)))))
        means, ws = [], []
        for _ in range(int(qmc_replicates)):
            sob = qmc.Sobol(proposal.dim + 1, scramble=True, seed=int(rng.integers(2**63)))
            u = sob.random(per)
            x = proposal.from_uniform(u)
            w = np.asarray(f(x), dtype=float) / proposal.pdf(x)
            means.append(float(w.mean()))
            ws.append(w)
        w = np.concatenate(ws)
        value = float(np.mean(means))
        se = float(np.std(means, ddof=1) / math.sqrt(len(means)))
    else:
        x = proposal.sample(rng, int(count))
        w = np.asarray(f(x), dtype=float) / proposal.pdf(x)
        value = float(w.mean())
        se = float(w.std(ddof=1) / math.sqrt(w.size))
    aw = np.abs(w)
    ess = float(aw.sum() ** 2 / np.sum(aw * aw)) if np.any(aw) else 0.0
    if ess < min_ess_fraction * w.size:
        raise DegenerateWeights(f"effective sample size {ess:.1f} below {min_ess_fraction} * {w.size}")
    return MCEstimate(value, se, ess, int(w.size))


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, (np.bool_, bool)):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, (np.floating, float)):
        v = float(o)
        return v if math.isfinite(v) else repr(v)
    if isinstance(o, np.ndarray):
        return _jsonable(o.tolist())
    if isinstance(o, complex):
        return [o.real, o.imag]
    return o


def atomic_write_text(path, text):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(path, reports, manifest=None):
    """Write reports (plus the run manifest) as pretty-printed, key-sorted JSON."""
    bundle = {
        "manifest": manifest or {},
        "passed": all(r.passed for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    atomic_write_text(path, json.dumps(_jsonable(bundle), indent=2, sort_keys=True) + "\n")
    return bundle

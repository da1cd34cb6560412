"""Complex hyperbolic space H_c^n in half-space coordinates (x_1, y, z~).

``z~`` is stored interleaved as (x_2, y_2, ..., x_n, y_n).  The sampler uses
the explicit solution ``Y = y exp(B - n t)``, ``Z~ = z~ + ∫ Y dw`` and
``X = x_1 + ∫ Y^2 dw_2 + 2 Σ S_k`` with left-point stochastic areas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend, _fallback
from .core import SimConfig, check_stream
from .real_space import asinh_exp
from .special import DEFAULT_SPEC, QuadratureSpec, integrate_semi_infinite, log_gamma


@dataclass(frozen=True)
class ComplexPoint:
    x1: float
    y: float
    tilde: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.tilde, dtype=float))
        if t.ndim != 1 or t.size < 2 or t.size % 2:
            raise ValueError("tilde must hold 2(n-1) >= 2 reals")
        if not (self.y > 0 and math.isfinite(self.y)):
            raise ValueError(f"y must be positive, got {self.y!r}")
        object.__setattr__(self, "tilde", t)
        object.__setattr__(self, "x1", float(self.x1))
        object.__setattr__(self, "y", float(self.y))

    @property
    def n(self):
        return self.tilde.size // 2 + 1

    def boundary(self):
        """Boundary coordinates (x_1, x_2, y_2, ...) as one vector."""
        return np.concatenate([[self.x1], self.tilde])


@dataclass(frozen=True)
class ComplexFreq:
    p: float
    q: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        r = np.atleast_1d(np.asarray(self.r, dtype=float))
        if q.shape != r.shape:
            raise ValueError("q and r must have equal length")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "p", float(self.p))

    def vector(self):
        """Frequency dotted against (x_1, x_2, y_2, ...)."""
        v = np.empty(1 + 2 * self.q.size)
        v[0] = self.p
        v[1::2] = self.q
        v[2::2] = self.r
        return v

    def __neg__(self):
        return ComplexFreq(-self.p, -self.q, -self.r)


def phi_pair(x1, tilde, x1p, tildep):
    """``φ = x_1' - x_1 + Σ (y_k' x_k - x_k' y_k)`` (arrays broadcast on leading axes)."""
    t = np.asarray(tilde, dtype=float)
    tp = np.asarray(tildep, dtype=float)
    return (np.asarray(x1p) - np.asarray(x1)
            + np.sum(tp[..., 1::2] * t[..., 0::2] - tp[..., 0::2] * t[..., 1::2], axis=-1))


def dist_sinh_log(logy, logy2, d_sq, phi_sq):
    """Distance from ``sinh^2 d = [(y'^2-y^2)^2 + 2D(y^2+y'^2) + D^2 + 4|φ|^2] / (4 y^2 y'^2)``.

    Shared by the complex and quaternionic models; ``D = |Δz~|^2`` and
    ``phi_sq`` is the squared norm of the twist term(s).
    """
    logy = np.asarray(logy, dtype=float)
    logy2 = np.asarray(logy2, dtype=float)
    y2a = np.exp(2.0 * logy)
    y2b = np.exp(2.0 * logy2)
    hi = np.maximum(logy, logy2)
    lo = np.minimum(logy, logy2)
    # (y'^2 - y^2)^2 = y_hi^4 (1 - e^{2(lo-hi)})^2
    gap = np.exp(4.0 * hi) * np.expm1(2.0 * (lo - hi)) ** 2
    num = gap + 2.0 * d_sq * (y2a + y2b) + d_sq * d_sq + 4.0 * phi_sq
    with np.errstate(divide="ignore"):
        L = 0.5 * np.log(num) - math.log(2.0) - logy - logy2
    d = asinh_exp(L)
    return np.where(num == 0.0, 0.0, d) if np.ndim(d) else (0.0 if num == 0 else float(d))


def dist_complex_log(x1, logy, tilde, x1p, logyp, tildep):
    t = np.asarray(tilde, dtype=float)
    tp = np.asarray(tildep, dtype=float)
    d_sq = np.sum((tp - t) ** 2, axis=-1)
    ph = phi_pair(x1, t, x1p, tp)
    return dist_sinh_log(logy, logyp, d_sq, ph * ph)


def dist_complex(z: ComplexPoint, z2: ComplexPoint) -> float:
    """Distance on H_c^n; ``cosh^2 d = ((y'^2 + Φ)^2 + 4 φ^2) / (4 y^2 y'^2)``."""
    if z.n != z2.n:
        raise ValueError(f"dimension mismatch: {z.n} vs {z2.n}")
    return float(dist_complex_log(z.x1, math.log(z.y), z.tilde, z2.x1, math.log(z2.y), z2.tilde))


@dataclass
class ComplexTrajectory:
    t: np.ndarray
    x1: np.ndarray
    log_y: np.ndarray
    tilde: np.ndarray


@dataclass
class ComplexTerminal:
    x1: np.ndarray
    log_y: np.ndarray
    tilde: np.ndarray

    def boundary(self):
        return np.column_stack([self.x1, self.tilde])


def sample_complex_bm(z0: ComplexPoint, config: SimConfig, stream_id: int) -> ComplexTrajectory:
    """Grid trajectories.  Noise components: B, w_2, then (w_{2k-1}, w_{2k}) per k."""
    stream_id = check_stream(stream_id)
    xs, lys, ts = _fallback.complex_paths(int(config.seed), stream_id, 0, config.n_samples,
                                          config.n_steps, config.step, z0.x1, z0.y, z0.tilde,
                                          record=True)
    return ComplexTrajectory(config.t_grid(), xs, lys, ts)


def sample_complex_terminal(z0: ComplexPoint, config: SimConfig, stream_id: int,
                            start: int = 0) -> ComplexTerminal:
    stream_id = check_stream(stream_id)
    m = z0.tilde.size
    x1 = np.empty(config.n_samples)
    ly = np.empty(config.n_samples)
    tl = np.empty((config.n_samples, m))
    _backend.run_split("complex_terminal", int(config.seed), stream_id, config.n_samples,
                       (config.n_steps, config.step, z0.x1, z0.y, np.ascontiguousarray(z0.tilde)),
                       (x1, ly, tl), config.n_workers, start)
    return ComplexTerminal(x1, ly, tl)


def poisson_kernel_complex(n, x1p, tilde_p, z0: ComplexPoint):
    """Poisson kernel ``2^{2n-1} Γ(n) y^{2n} / (π^n (4φ^2 + Φ^2)^n)`` on R^{2n-1}.

    ``x1p`` and ``tilde_p`` may carry matching leading batch axes.

    Examples
    --------
    >>> z0 = ComplexPoint(0.0, 1.0, [0.0, 0.0])
    >>> round(float(poisson_kernel_complex(2, 0.0, [0.0, 0.0], z0)), 7)
    0.8105695
    """
    n = int(n)
    if n < 2 or z0.n != n:
        raise ValueError("need n >= 2 matching the base point")
    tp = np.asarray(tilde_p, dtype=float)
    big_phi = z0.y ** 2 + np.sum((tp - z0.tilde) ** 2, axis=-1)
    ph = phi_pair(z0.x1, z0.tilde, x1p, tp)
    logc = (2 * n - 1) * math.log(2.0) + log_gamma(n) - n * math.log(math.pi)
    return np.exp(logc + 2 * n * math.log(z0.y) - n * np.log(4.0 * ph * ph + big_phi * big_phi))


def _poisson_integral(a, big_h, m, j, big_n, spec):
    """``e^{-a}/Γ(N) ∫_0^∞ s^m (2a+s)^m (a+s)^{-j} exp(-s - H/(a+s)) ds``.

    This is the u-integral of the limiting characteristic function after
    ``k = coth u`` and ``k = 1 + s/a``; unlike the u-form it stays regular as
    ``a -> 0``.
    """
    lg = log_gamma(big_n)

    def f(s):
        with np.errstate(divide="ignore"):
            return np.exp(m * np.log(s) + m * np.log(2.0 * a + s) - j * np.log(a + s)
                          - s - big_h / (a + s) - a - lg)

    scale = max(1.0, float(m - j + 1), math.sqrt(big_h))
    return integrate_semi_infinite(f, spec, scale=scale)


def limit_charfn_complex(n, freq: ComplexFreq, z0: ComplexPoint,
                         spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """Limit of ``E exp(i(p X + Σ (q_k X_k + r_k Y_k)))`` as t -> ∞.

    Equals ``e^{if} J`` with ``f = p x_1 + Σ(q_k x_k + r_k y_k)`` and
    ``J = E[exp(-p^2 y^4 Ã/2) cosh(p y^2 A)^{1-n} exp(-F tanh(p y^2 A))]``
    averaged against the perpetual-integral law.  ``J`` is evaluated as a
    single Laplace-type integral which is continuous in ``p`` (including
    ``p = 0``).
    """
    n = int(n)
    if z0.n != n or freq.q.size != n - 1:
        raise ValueError("dimension mismatch")
    p = freq.p
    xs = z0.tilde[0::2]
    ys = z0.tilde[1::2]
    f = p * z0.x1 + float(freq.q @ xs + freq.r @ ys)
    c_sq = float(np.sum((freq.q + p * ys) ** 2 + (freq.r - p * xs) ** 2))
    a = 0.5 * abs(p) * z0.y ** 2
    big_h = 0.25 * c_sq * z0.y ** 2
    val = _poisson_integral(a, big_h, n - 1, n - 1, n, spec)
    return complex(math.cos(f), math.sin(f)) * val


def limit_charfn_complex_u(n, freq: ComplexFreq, z0: ComplexPoint,
                           spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """Same quantity from the original u-integral (p != 0 only); an independent cross-check."""
    n = int(n)
    p = freq.p
    if p == 0.0:
        raise ValueError("u-form requires p != 0")
    xs = z0.tilde[0::2]
    ys = z0.tilde[1::2]
    f = p * z0.x1 + float(freq.q @ xs + freq.r @ ys)
    big_f = float(np.sum((freq.q + p * ys) ** 2 + (freq.r - p * xs) ** 2)) / (2.0 * abs(p))
    c = abs(p) * z0.y ** 2 / 2.0
    logpre = n * math.log(abs(p) * z0.y ** 2) - n * math.log(2.0) - log_gamma(n)

    def g(u):
        with np.errstate(over="ignore", divide="ignore"):
            lsh = np.log(np.sinh(u))
            lch = np.log(np.cosh(u))
            return np.exp(logpre - (n + 1) * lsh - (n - 1) * lch - c / np.tanh(u) - big_f * np.tanh(u))

    return complex(math.cos(f), math.sin(f)) * integrate_semi_infinite(g, spec)


def sample_poisson_complex(n, z0: ComplexPoint, count, rng: np.random.Generator):
    """Exact draws (x_1', z~') from the complex Poisson kernel.

    ``z~' - z~`` is multivariate t (2n dof, scale y / sqrt(2n)); given it,
    ``φ`` is ``(Φ / 2)`` times a t_{2n-1} variate over sqrt(2n-1).
    """
    n = int(n)
    d = 2 * (n - 1)
    nu = 2 * n
    zeta = rng.standard_normal((count, d)) * (z0.y / np.sqrt(rng.chisquare(nu, count)))[:, None]
    big_phi = z0.y ** 2 + np.sum(zeta * zeta, axis=1)
    nu2 = 2 * n - 1
    ph = 0.5 * big_phi * rng.standard_normal(count) / np.sqrt(rng.chisquare(nu2, count))
    tp = z0.tilde + zeta
    x1p = z0.x1 + ph - np.sum(tp[:, 1::2] * z0.tilde[0::2] - tp[:, 0::2] * z0.tilde[1::2], axis=1)
    return x1p, tp

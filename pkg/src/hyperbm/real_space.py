"""Real hyperbolic half-space H^{n+1} = {(x, y) : x in R^n, y > 0}.

Brownian motion is sampled from its explicit solution
``Y = y exp(B_t - n t / 2)``, ``X_i = x_i + ∫ Y dw_i``; heights are carried as
``log y`` so long horizons do not underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import j0, jn_zeros

from . import _backend, _fallback
from .core import SimConfig, check_stream
from .special import DEFAULT_SPEC, DomainError, bessel_k, integrate_interval, log_gamma


@dataclass(frozen=True)
class RealPoint:
    x: np.ndarray
    y: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        if x.ndim != 1 or x.size < 1:
            raise ValueError("x must be a non-empty 1-d array")
        if not (self.y > 0 and math.isfinite(self.y)):
            raise ValueError(f"y must be positive, got {self.y!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", float(self.y))

    @property
    def n(self):
        return self.x.size


@dataclass(frozen=True)
class RealFreq:
    lam: np.ndarray

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.lam, dtype=float))
        if not np.all(np.isfinite(lam)):
            raise ValueError("frequency must be finite")
        object.__setattr__(self, "lam", lam)


def asinh_exp(L):
    """``asinh(exp(L))`` without overflow for large ``L``."""
    L = np.asarray(L, dtype=float)
    big = L > 20.0
    safe = np.where(big, 0.0, L)
    out = np.where(big, L + np.log1p(np.sqrt(1.0 + np.exp(-2.0 * np.where(big, L, 0.0)))),
                   np.arcsinh(np.exp(safe)))
    return out if out.ndim else float(out)


def dist_real_log(x, logy, x2, logy2):
    """Vectorised distance from coordinates with log-heights.

    Uses ``sinh(d/2) = sqrt(|dx|^2 + dy^2) / (2 sqrt(y y'))``.
    """
    x = np.asarray(x, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    logy = np.asarray(logy, dtype=float)
    logy2 = np.asarray(logy2, dtype=float)
    dx2 = np.sum((x2 - x) ** 2, axis=-1)
    hi = np.maximum(logy, logy2)
    lo = np.minimum(logy, logy2)
    # (y - y')^2 = y_hi^2 (1 - e^{lo-hi})^2
    dy2 = np.exp(2.0 * hi) * np.expm1(lo - hi) ** 2
    num = dx2 + dy2
    with np.errstate(divide="ignore"):
        L = 0.5 * np.log(num) - math.log(2.0) - 0.5 * (logy + logy2)
    d = 2.0 * asinh_exp(L)
    return np.where(num == 0.0, 0.0, d) if np.ndim(d) else (0.0 if num == 0 else float(d))


def dist_real(z: RealPoint, z2: RealPoint) -> float:
    """Hyperbolic distance; ``cosh d = (|x - x'|^2 + y^2 + y'^2) / (2 y y')``.

    Examples
    --------
    >>> round(dist_real(RealPoint([0.0], 1.0), RealPoint([0.0], math.e)), 12)
    1.0
    """
    if z.n != z2.n:
        raise ValueError(f"dimension mismatch: {z.n} vs {z2.n}")
    return float(dist_real_log(z.x, math.log(z.y), z2.x, math.log(z2.y)))


@dataclass
class RealTrajectory:
    """Grid trajectories; ``x`` is (samples, steps+1, n) and ``log_y`` (samples, steps+1)."""

    t: np.ndarray
    x: np.ndarray
    log_y: np.ndarray

    @property
    def y(self):
        return np.exp(self.log_y)


@dataclass
class RealTerminal:
    x: np.ndarray
    log_y: np.ndarray

    @property
    def y(self):
        return np.exp(self.log_y)


def drift_real(n):
    return 0.5 * n


def sample_real_bm(z0: RealPoint, config: SimConfig, stream_id: int) -> RealTrajectory:
    """Full grid trajectories (memory grows with samples x steps)."""
    stream_id = check_stream(stream_id)
    xs, lys = _fallback.real_paths(int(config.seed), stream_id, 0, config.n_samples,
                                   config.n_steps, config.step, z0.x, z0.y, record=True)
    return RealTrajectory(config.t_grid(), xs, lys)


def sample_real_terminal(z0: RealPoint, config: SimConfig, stream_id: int, start: int = 0) -> RealTerminal:
    """Positions at ``config.horizon`` for paths ``start .. start + n_samples - 1``."""
    stream_id = check_stream(stream_id)
    x = np.empty((config.n_samples, z0.n))
    ly = np.empty(config.n_samples)
    _backend.run_split("real_terminal", int(config.seed), stream_id, config.n_samples,
                       (config.n_steps, config.step, np.ascontiguousarray(z0.x), z0.y),
                       (x, ly), config.n_workers, start)
    return RealTerminal(x, ly)


def _check_y(y):
    y = np.asarray(y, dtype=float)
    if np.any(~(y > 0)):
        raise DomainError("y must be positive")
    return y


def poisson_kernel_real(n, xi, y):
    """Hyperbolic Poisson kernel ``p_{n+1}(xi, y)`` on R^n.

    ``xi`` has trailing axis n (a scalar is accepted for n = 1).

    Examples
    --------
    >>> round(float(poisson_kernel_real(1, 0.0, 1.0)), 7)
    0.3183099
    """
    n = int(n)
    y = _check_y(y)
    xi = np.asarray(xi, dtype=float)
    r2 = xi * xi if n == 1 and (xi.ndim == 0 or xi.shape[-1] != 1) else np.sum(xi * xi, axis=-1)
    logc = (n - 1) * math.log(2.0) + log_gamma(0.5 * (n + 1)) - 0.5 * (n + 1) * math.log(math.pi)
    return np.exp(logc + n * np.log(y) - n * np.log(y * y + r2))


def poisson_kernel_euclid(n, xi, y):
    """Euclidean Poisson kernel ``q_{n+1}(xi, y)`` of the hyperplane in R^{n+1}."""
    n = int(n)
    y = _check_y(y)
    xi = np.asarray(xi, dtype=float)
    r2 = xi * xi if n == 1 and (xi.ndim == 0 or xi.shape[-1] != 1) else np.sum(xi * xi, axis=-1)
    logc = log_gamma(0.5 * (n + 1)) - 0.5 * (n + 1) * math.log(math.pi)
    return np.exp(logc + np.log(y) - 0.5 * (n + 1) * np.log(y * y + r2))


def fourier_real(n, lam, y, spec=DEFAULT_SPEC):
    """Characteristic function of the limit law ``p_{n+1}(. , y)`` for n in {2, 3}.

    ``y|λ| K_1(y|λ|)`` for n = 2 and ``(1 + y|λ|) e^{-y|λ|}`` for n = 3.
    """
    n = int(n)
    if n not in (2, 3):
        raise DomainError(f"closed form available only for n = 2, 3 (got n = {n})")
    lam = lam.lam if isinstance(lam, RealFreq) else np.atleast_1d(np.asarray(lam, dtype=float))
    if lam.size != n:
        raise ValueError(f"frequency must have {n} components")
    s = float(y) * float(np.linalg.norm(lam))
    if s == 0.0:
        return 1.0
    if n == 2:
        return s * bessel_k(1.0, s, spec)
    return (1.0 + s) * math.exp(-s)


def hitting_charfn(n, lam, z0: RealPoint, a, spec=DEFAULT_SPEC) -> complex:
    """``E exp(i <λ, X(τ_a)>)`` for the first time Y falls to level ``a < y``."""
    if z0.n != int(n):
        raise ValueError("dimension mismatch")
    if not 0 < a < z0.y:
        raise DomainError("hitting level must satisfy 0 < a < y (upward hitting is not almost sure)")
    lam_v = lam.lam if isinstance(lam, RealFreq) else np.atleast_1d(np.asarray(lam, dtype=float))
    phase = complex(math.cos(lam_v @ z0.x), math.sin(lam_v @ z0.x))
    return phase * fourier_real(n, lam_v, z0.y, spec) / fourier_real(n, lam_v, a, spec)


@dataclass
class HittingSample:
    x: np.ndarray
    tau: np.ndarray
    hit: np.ndarray


def sample_real_hitting(z0: RealPoint, a, config: SimConfig, stream_id: int, refine: int = 8,
                        start: int = 0) -> HittingSample:
    """Positions at the first passage of Y below ``a``, searched up to ``config.horizon``.

    The crossing step is resolved by a Brownian bridge over ``refine``
    substeps.  Paths that have not hit by the horizon have ``hit = False``.
    """
    if not 0 < a < z0.y:
        raise DomainError("hitting level must satisfy 0 < a < y")
    stream_id = check_stream(stream_id)
    x = np.empty((config.n_samples, z0.n))
    tau = np.empty(config.n_samples)
    hit = np.empty(config.n_samples, dtype=np.int8)
    _backend.run_split("real_hit", int(config.seed), stream_id, config.n_samples,
                       (config.n_steps, config.step, np.ascontiguousarray(z0.x), z0.y, float(a),
                        int(refine)),
                       (x, tau, hit), config.n_workers, start)
    return HittingSample(x, tau, hit.astype(bool))


def sample_radial_sde(n, r0, t, config: SimConfig, stream_id: int, noise_scale: float = 1.0,
                      start: int = 0) -> np.ndarray:
    """Euler samples of ``dr = dβ + (n/2) coth(r) dt`` at time ``t``.

    Steps that would leave (0, inf) are bisected along a Brownian bridge
    (up to depth 40, floor 1e-12).  ``noise_scale = 0`` gives the
    deterministic drift flow.
    """
    if not r0 > 0:
        raise DomainError("r0 must be positive")
    stream_id = check_stream(stream_id)
    cfg = config.with_(horizon=float(t))
    out = np.empty(cfg.n_samples)
    _backend.run_split("radial_euler", int(cfg.seed), stream_id, cfg.n_samples,
                       (cfg.n_steps, cfg.step, float(n), float(r0), float(noise_scale)),
                       (out,), cfg.n_workers, start)
    return out


def sample_poisson_real(n, z0: RealPoint, count, rng: np.random.Generator) -> np.ndarray:
    """Exact draws from ``p_{n+1}(. - x, y)``.

    The kernel is a multivariate Student t with ``n`` degrees of freedom and
    scale ``y / sqrt(n)``.
    """
    n = int(n)
    g = rng.standard_normal((count, n))
    chi2 = rng.chisquare(n, count)
    return z0.x + z0.y * g / np.sqrt(chi2)[:, None]


def cauchy_cdf(x, loc=0.0, scale=1.0):
    return 0.5 + np.arctan((np.asarray(x, dtype=float) - loc) / scale) / math.pi


def numeric_fourier_p3(lam_norm, y=1.0, n_zeros=400, spec=DEFAULT_SPEC) -> float:
    """Two-dimensional Fourier transform of ``p_3(., y)`` at radius ``|λ|`` by quadrature.

    Radial (Hankel) form ``2π ∫ J_0(|λ| r) p_3(r) r dr``, integrated between
    consecutive zeros of ``J_0``; the alternating tail is closed by averaging
    the last two partial sums.
    """
    lam_norm = float(lam_norm)

    def f(r):
        return 2.0 * math.pi * r * poisson_kernel_real(2, np.stack([r, np.zeros_like(r)], -1), y)

    if lam_norm == 0.0:
        from .special import integrate_semi_infinite
        return integrate_semi_infinite(f, spec, scale=y)
    edges = np.concatenate([[0.0], jn_zeros(0, n_zeros) / lam_norm])
    parts = [integrate_interval(lambda r: j0(lam_norm * r) * f(r), lo, hi, spec)
             for lo, hi in zip(edges[:-1], edges[1:])]
    partial = np.cumsum(parts)
    return float(0.5 * (partial[-1] + partial[-2]))

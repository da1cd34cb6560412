"""Quaternionic hyperbolic space H_q^n in half-space coordinates.

A point is (x_1, y, x_{n+1}, y_{n+1}, θ_2, ..., θ_n) with blocks
``θ_k = (x_k, y_k, x_{n+k}, y_{n+k})``.  The three "head" coordinates
(x_1, x_{n+1}, y_{n+1}) are driven by ``Y^2 dB_i`` plus area-type integrals
of the blocks; the blocks themselves are ``θ_k + ∫ Y dw``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend, _fallback
from .complex_space import _poisson_integral, dist_sinh_log
from .core import SimConfig, check_stream
from .special import DEFAULT_SPEC, QuadratureSpec, integrate_semi_infinite, log_gamma


@dataclass(frozen=True)
class QuatPoint:
    x1: float
    y: float
    xn1: float
    yn1: float
    tilde: np.ndarray

    def __post_init__(self):
        t = np.atleast_1d(np.asarray(self.tilde, dtype=float))
        if t.ndim != 1 or t.size < 4 or t.size % 4:
            raise ValueError("tilde must hold 4(n-1) >= 4 reals")
        if not (self.y > 0 and math.isfinite(self.y)):
            raise ValueError(f"y must be positive, got {self.y!r}")
        object.__setattr__(self, "tilde", t)
        for k in ("x1", "y", "xn1", "yn1"):
            object.__setattr__(self, k, float(getattr(self, k)))

    @property
    def n(self):
        return self.tilde.size // 4 + 1

    @property
    def head(self):
        return np.array([self.x1, self.xn1, self.yn1])

    def boundary(self):
        """(x_1, x_{n+1}, y_{n+1}, θ_2, ..., θ_n) as one vector of length 4n - 1."""
        return np.concatenate([self.head, self.tilde])


@dataclass(frozen=True)
class QuatFreq:
    xi: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float).reshape(3)
        w = np.atleast_1d(np.asarray(self.w, dtype=float)).ravel()
        if w.size % 4:
            raise ValueError("w must hold blocks of 4 reals")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "w", w)

    def vector(self):
        return np.concatenate([self.xi, self.w])

    def __neg__(self):
        return QuatFreq(-self.xi, -self.w)


def xi_matrix(xi) -> np.ndarray:
    a, b, c = (float(v) for v in xi)
    return np.array([
        [0.0, a, -b, -c],
        [-a, 0.0, -c, b],
        [b, c, 0.0, a],
        [c, -b, -a, 0.0],
    ])


def _standard_k(r):
    return np.array([
        [0.0, -r, 0.0, 0.0],
        [r, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -r],
        [0.0, 0.0, r, 0.0],
    ])


def _printed_q(xi):
    a, b, c = xi
    r = math.sqrt(a * a + b * b + c * c)
    s = math.hypot(b, c)
    return np.array([
        [0.0, a / r, s / r, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, c / r, -a * c / (s * r), b / s],
        [0.0, -b / r, a * b / (s * r), c / s],
    ])


def _numeric_q(big_xi, r):
    """Orthonormal basis (q1, Ξq1/r, q3, Ξq3/r) bringing Ξ to standard form.

    Since Ξ^T Ξ = r^2 I, ``Ξ q / r`` is a unit vector orthogonal to ``q`` and
    ``Ξ (Ξ q / r) = -r q``; the second pair is built the same way inside the
    orthogonal complement.
    """
    e = np.eye(4)
    q1 = e[0]
    q2 = big_xi @ q1 / r
    basis = [q1, q2]
    for cand in e[1:]:
        v = cand - sum((cand @ b) * b for b in basis)
        if np.linalg.norm(v) > 0.5:
            q3 = v / np.linalg.norm(v)
            break
    q4 = big_xi @ q3 / r
    return np.column_stack([q1, q2, q3, q4])


@dataclass
class SkewBlock:
    Xi: np.ndarray
    Q: np.ndarray
    K: np.ndarray
    method: str = "printed"
    diagnostics: dict = field(default_factory=dict)


def _block_residuals(big_xi, q, k):
    return (float(np.max(np.abs(q.T @ q - np.eye(4)))),
            float(np.max(np.abs(q.T @ big_xi @ q - k))))


def build_skew_block(xi, tol=1e-12) -> SkewBlock:
    """Ξ for frequency ``xi`` together with an orthogonal Q such that Q^T Ξ Q = K.

    The closed-form Q is used when ``xi_2^2 + xi_3^2 > 0`` and it validates;
    otherwise Q is built numerically and the reason is kept in ``diagnostics``.
    """
    xi = np.asarray(xi, dtype=float).reshape(3)
    r = float(np.linalg.norm(xi))
    if r == 0.0:
        raise ValueError("degenerate frequency: |xi| = 0")
    big_xi = xi_matrix(xi)
    k = _standard_k(r)
    diag = {}
    if math.hypot(xi[1], xi[2]) > 0.0:
        q = _printed_q(xi)
        orth, conj = _block_residuals(big_xi, q, k)
        if orth <= tol and conj <= tol * max(1.0, r):
            return SkewBlock(big_xi, q, k, "printed", {"orth": orth, "conj": conj})
        diag["printed_rejected"] = {"orth": orth, "conj": conj}
    else:
        diag["printed_undefined"] = "xi_2 = xi_3 = 0"
    q = _numeric_q(big_xi, r)
    orth, conj = _block_residuals(big_xi, q, k)
    diag.update(orth=orth, conj=conj)
    if orth > tol or conj > tol * max(1.0, r):
        raise ArithmeticError(f"skew block factorisation failed: {diag}")
    return SkewBlock(big_xi, q, k, "numeric", diag)


def twist_terms(head, tilde, headp, tildep):
    """(φ_1, φ_2, φ_3) between two points; arrays broadcast on leading axes."""
    t = np.asarray(tilde, dtype=float)
    tp = np.asarray(tildep, dtype=float)
    a, b, c, d = (t[..., i::4] for i in range(4))
    ap, bp, cp, dp = (tp[..., i::4] for i in range(4))
    dh = np.asarray(headp, dtype=float) - np.asarray(head, dtype=float)
    p1 = dh[..., 0] + np.sum((bp * a - ap * b) + (dp * c - cp * d), axis=-1)
    p2 = dh[..., 1] + np.sum((ap * c - cp * a) + (dp * b - bp * d), axis=-1)
    p3 = dh[..., 2] + np.sum((ap * d - dp * a) + (bp * c - cp * b), axis=-1)
    return np.stack([p1, p2, p3], axis=-1)


def dist_quat_log(head, logy, tilde, headp, logyp, tildep):
    t = np.asarray(tilde, dtype=float)
    tp = np.asarray(tildep, dtype=float)
    d_sq = np.sum((tp - t) ** 2, axis=-1)
    ph = twist_terms(head, t, headp, tp)
    return dist_sinh_log(logy, logyp, d_sq, np.sum(ph * ph, axis=-1))


def dist_quat(z: QuatPoint, z2: QuatPoint) -> float:
    """Distance on H_q^n; ``cosh^2 d = ((y'^2 + Φ)^2 + 4|φ|^2) / (4 y^2 y'^2)``."""
    if z.n != z2.n:
        raise ValueError(f"dimension mismatch: {z.n} vs {z2.n}")
    return float(dist_quat_log(z.head, math.log(z.y), z.tilde, z2.head, math.log(z2.y), z2.tilde))


@dataclass
class QuatTrajectory:
    t: np.ndarray
    head: np.ndarray
    log_y: np.ndarray
    tilde: np.ndarray


@dataclass
class QuatTerminal:
    head: np.ndarray
    log_y: np.ndarray
    tilde: np.ndarray

    def boundary(self):
        return np.column_stack([self.head, self.tilde])


def sample_quat_bm(z0: QuatPoint, config: SimConfig, stream_id: int) -> QuatTrajectory:
    """Grid trajectories.  Noise components: B, B_1, B_2, B_3, then 4 per block."""
    stream_id = check_stream(stream_id)
    hs, lys, ts = _fallback.quat_paths(int(config.seed), stream_id, 0, config.n_samples,
                                       config.n_steps, config.step, z0.head, z0.y, z0.tilde,
                                       record=True)
    return QuatTrajectory(config.t_grid(), hs, lys, ts)


def sample_quat_terminal(z0: QuatPoint, config: SimConfig, stream_id: int,
                         start: int = 0) -> QuatTerminal:
    stream_id = check_stream(stream_id)
    head = np.empty((config.n_samples, 3))
    ly = np.empty(config.n_samples)
    tl = np.empty((config.n_samples, z0.tilde.size))
    _backend.run_split("quat_terminal", int(config.seed), stream_id, config.n_samples,
                       (config.n_steps, config.step, np.ascontiguousarray(z0.head), z0.y,
                        np.ascontiguousarray(z0.tilde)),
                       (head, ly, tl), config.n_workers, start)
    return QuatTerminal(head, ly, tl)


def poisson_kernel_quat(n, boundary, z0: QuatPoint):
    """Poisson kernel ``2^{4n+1} Γ(2n) π^{-2n} y^{2(2n+1)} / (Φ^2 + 4|φ|^2)^{2n+1}``.

    ``boundary`` is a vector (or batch) laid out as ``QuatPoint.boundary()``.

    Examples
    --------
    >>> z0 = QuatPoint(0.0, 1.0, 0.0, 0.0, np.zeros(4))
    >>> round(float(poisson_kernel_quat(2, np.zeros(7), z0)), 5)
    31.5371
    """
    n = int(n)
    if n < 2 or z0.n != n:
        raise ValueError("need n >= 2 matching the base point")
    bd = np.asarray(boundary, dtype=float)
    tp = bd[..., 3:]
    big_phi = z0.y ** 2 + np.sum((tp - z0.tilde) ** 2, axis=-1)
    ph = twist_terms(z0.head, z0.tilde, bd[..., :3], tp)
    logc = (4 * n + 1) * math.log(2.0) + log_gamma(2 * n) - 2 * n * math.log(math.pi)
    return np.exp(logc + 2 * (2 * n + 1) * math.log(z0.y)
                  - (2 * n + 1) * np.log(big_phi ** 2 + 4.0 * np.sum(ph * ph, axis=-1)))


def twist_energy(xi, theta_blocks, w_blocks):
    """``F = Σ_k |Ξ θ_k + w_k|^2``."""
    big_xi = xi_matrix(xi)
    th = np.asarray(theta_blocks, dtype=float).reshape(-1, 4)
    w = np.asarray(w_blocks, dtype=float).reshape(-1, 4)
    v = th @ big_xi.T + w
    return float(np.sum(v * v))


def limit_charfn_quat(n, freq: QuatFreq, z0: QuatPoint,
                      spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """Characteristic function of the boundary limit (X_1, X_{n+1}, Y_{n+1}, Z~)(∞).

    ``e^{iψ}`` times a real integral in ``a = |ξ| y^2 / 2`` and
    ``H = F y^2 / 4``; the substituted form is continuous at ``ξ = 0``.
    """
    n = int(n)
    if z0.n != n or freq.w.size != 4 * (n - 1):
        raise ValueError("dimension mismatch")
    psi = float(freq.xi @ z0.head + freq.w @ z0.tilde)
    r = float(np.linalg.norm(freq.xi))
    big_f = twist_energy(freq.xi, z0.tilde, freq.w)
    a = 0.5 * r * z0.y ** 2
    val = _poisson_integral(a, 0.25 * big_f * z0.y ** 2, 2 * n - 1, 2 * (n - 1), 2 * n + 1, spec)
    return complex(math.cos(psi), math.sin(psi)) * val


def limit_charfn_quat_u(n, freq: QuatFreq, z0: QuatPoint,
                        spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """The same value from the original u-integral (|ξ| > 0 only)."""
    n = int(n)
    r = float(np.linalg.norm(freq.xi))
    if r == 0.0:
        raise ValueError("u-form requires |xi| > 0")
    psi = float(freq.xi @ z0.head + freq.w @ z0.tilde)
    big_f = twist_energy(freq.xi, z0.tilde, freq.w)
    c = 0.5 * r * z0.y ** 2
    logpre = (2 * n + 1) * math.log(r * z0.y ** 2) - (2 * n + 1) * math.log(2.0) - log_gamma(2 * n + 1)

    def g(u):
        with np.errstate(over="ignore", divide="ignore"):
            return np.exp(logpre - 2 * (n - 1) * np.log(np.cosh(u)) - 2 * (n + 1) * np.log(np.sinh(u))
                          - c / np.tanh(u) - big_f * np.tanh(u) / (2.0 * r))

    return complex(math.cos(psi), math.sin(psi)) * integrate_semi_infinite(g, spec)


def sample_poisson_quat(n, z0: QuatPoint, count, rng: np.random.Generator):
    """Exact draws from the quaternionic Poisson kernel, as boundary vectors.

    ``θ' - θ`` is multivariate t (4n + 2 dof, scale y / sqrt(4n + 2)); given
    it, ``φ`` in R^3 is multivariate t (4n - 1 dof, scale Φ / (2 sqrt(4n - 1))).
    """
    n = int(n)
    d = 4 * (n - 1)
    delta = rng.standard_normal((count, d)) * (z0.y / np.sqrt(rng.chisquare(4 * n + 2, count)))[:, None]
    tp = z0.tilde + delta
    big_phi = z0.y ** 2 + np.sum(delta * delta, axis=1)
    ph = rng.standard_normal((count, 3)) * (0.5 * big_phi / np.sqrt(rng.chisquare(4 * n - 1, count)))[:, None]
    # φ is affine in the head with unit slope, so subtract the block part at head' = head
    offset = twist_terms(np.zeros(3), z0.tilde, np.zeros(3), tp)
    head = z0.head + ph - offset
    return np.column_stack([head, tp])

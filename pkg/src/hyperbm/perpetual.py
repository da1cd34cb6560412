"""Perpetual integrals of geometric Brownian motion and their transforms.

For ``B^{(-mu)}_s = B_s - mu s`` the integrals ``a = ∫ e^{B}``, ``A = ∫ e^{2B}``
and ``Ã = ∫ e^{4B}`` over (0, ∞) are finite.  ``A`` is distributed as
``1 / (2 γ_mu)`` and ``a`` as ``2 / γ_{2 mu}``; the evaluators below give
densities and Laplace transforms in closed form, and the samplers produce the
matching Monte Carlo objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .core import SimConfig, check_stream, sample_exp_functionals
from .special import DEFAULT_SPEC, DomainError, log_gamma, whittaker_w

TRUNCATION = 15.0


def _pos(name, v):
    if not (np.all(np.asarray(v) > 0)):
        raise DomainError(f"{name} must be positive")


def rng_for(seed, stream_id, tag=0) -> np.random.Generator:
    """numpy Generator keyed by (seed, stream_id, tag); independent of the path normals."""
    return np.random.Generator(np.random.Philox(key=[int(seed) & ((1 << 64) - 1),
                                                     (int(stream_id) * 7919 + int(tag) + 3) & ((1 << 64) - 1)]))


@dataclass
class PerpetualSample:
    a_small: np.ndarray
    a_big: np.ndarray
    a_tilde: np.ndarray
    horizon: float


def sample_perpetual(mu, config: SimConfig, stream_id: int, start: int = 0) -> PerpetualSample:
    """Path truncations of (a, A, Ã) at ``T = max(config.horizon, 15 / mu)``."""
    _pos("mu", mu)
    horizon = max(float(config.horizon), TRUNCATION / float(mu))
    cfg = config.with_(horizon=horizon)
    f = sample_exp_functionals(cfg, mu, stream_id, start)
    return PerpetualSample(f.a_small, f.a_big, f.a_tilde, cfg.horizon)


def sample_dufresne(mu, count, stream_id, seed=0) -> np.ndarray:
    """Exact draws of ``1 / (2 γ_mu)`` (the law of A_∞)."""
    _pos("mu", mu)
    check_stream(stream_id)
    g = rng_for(seed, stream_id).standard_gamma(float(mu), int(count))
    return 0.5 / g


def density_f1(mu, v):
    """Density of a_∞: ``2^{2mu} / Γ(2mu) v^{-(2mu+1)} e^{-2/v}``."""
    _pos("mu", mu)
    _pos("v", v)
    v = np.asarray(v, dtype=float)
    out = np.exp(2 * mu * math.log(2.0) - log_gamma(2 * mu) - (2 * mu + 1) * np.log(v) - 2.0 / v)
    return out if out.ndim else float(out)


def density_f2(mu, v):
    """Density of A_∞: ``v^{-(mu+1)} e^{-1/(2v)} / (2^mu Γ(mu))``."""
    _pos("mu", mu)
    _pos("v", v)
    v = np.asarray(v, dtype=float)
    out = np.exp(-(mu + 1) * np.log(v) - 0.5 / v - mu * math.log(2.0) - log_gamma(mu))
    return out if out.ndim else float(out)


def _log_sinh(x):
    return x + np.log1p(-np.exp(-2.0 * x)) - math.log(2.0)


def cond_laplace_given_a(mu, lam, v):
    """``E[exp(-λ^2 A_∞ / 2) | a_∞ = v] f_1(v)``.

    Closed form ``(λ / sinh(λv/2))^{2mu+1} exp(-λ coth(λv/2)) / (2 Γ(2mu))``.
    """
    _pos("mu", mu)
    _pos("lam", lam)
    _pos("v", v)
    v = np.asarray(v, dtype=float)
    h = 0.5 * lam * v
    out = np.exp((2 * mu + 1) * (math.log(lam) - _log_sinh(h)) - lam / np.tanh(h)
                 - math.log(2.0) - log_gamma(2 * mu))
    return out if out.ndim else float(out)


def cond_laplace_tilde(mu, lam, v):
    """``E[exp(-λ^2 Ã_∞ / 2) | A_∞ = v] f_2(v)``.

    Closed form ``(λ / sinh(λv))^{mu+1} exp(-λ coth(λv) / 2) / (2^mu Γ(mu))``.
    """
    _pos("mu", mu)
    _pos("lam", lam)
    _pos("v", v)
    v = np.asarray(v, dtype=float)
    h = lam * v
    out = np.exp((mu + 1) * (math.log(lam) - _log_sinh(h)) - 0.5 * lam / np.tanh(h)
                 - mu * math.log(2.0) - log_gamma(mu))
    return out if out.ndim else float(out)


def joint_laplace(mu, lam, kappa, spec=DEFAULT_SPEC) -> float:
    """``E exp(-λ^2 A_∞ / 2 + λ κ a_∞) = Γ(mu-κ+1/2)/Γ(2mu) (2λ)^{mu-1/2} W_{κ,mu}(2λ)``."""
    _pos("mu", mu)
    _pos("lam", lam)
    if not mu - kappa + 0.5 > 0:
        raise DomainError("joint_laplace requires mu - kappa + 1/2 > 0")
    w = whittaker_w(kappa, mu, 2.0 * lam, spec)
    return math.exp(log_gamma(mu - kappa + 0.5) - log_gamma(2 * mu)
                    + (mu - 0.5) * math.log(2.0 * lam)) * w


def hitting_laplace_vz(mu, lam, kappa, x, z, spec=DEFAULT_SPEC) -> float:
    """``E exp(-λ^2/2 ∫_0^τ X^{-2} ds + λκ ∫_0^τ X^{-1} ds)`` for ``X = x e^{B_s + mu s}``.

    ``τ`` is the first passage to ``z > x``.
    """
    _pos("mu", mu)
    _pos("lam", lam)
    if not 0 < x <= z:
        raise DomainError("hitting_laplace_vz requires 0 < x <= z")
    if x == z:
        return 1.0
    return (z / x) ** (mu - 0.5) * whittaker_w(kappa, mu, 2 * lam / x, spec) \
        / whittaker_w(kappa, mu, 2 * lam / z, spec)


@dataclass
class UpwardHitSample:
    int_inv_sq: np.ndarray
    int_inv: np.ndarray
    tau: np.ndarray
    hit: np.ndarray


def sample_gbm_upward_hit(mu, x, z, config: SimConfig, stream_id: int, refine: int = 8,
                          start: int = 0) -> UpwardHitSample:
    """Run ``x exp(B_s + mu s)`` until it first reaches ``z`` (searched up to the horizon)."""
    _pos("mu", mu)
    if not 0 < x < z:
        raise DomainError("need 0 < x < z")
    stream_id = check_stream(stream_id)
    out = np.empty((config.n_samples, 4))
    _backend.run_split("gbm_upward_hit", int(config.seed), stream_id, config.n_samples,
                       (config.n_steps, config.step, float(mu), float(x), float(z), int(refine)),
                       (out,), config.n_workers, start)
    return UpwardHitSample(out[:, 0], out[:, 1], out[:, 2], out[:, 3] > 0.5)

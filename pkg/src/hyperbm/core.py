"""Driving Wiener paths, exponential functionals and Lévy stochastic areas.

All randomness comes from counter-addressed normals (see ``hyperbm._philox``),
so a path is a pure function of ``(seed, stream_id, sample index)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from ._philox import DOMAIN_PATH

MAX_STEPS = 10**8
_U64 = 1 << 64


class ConfigError(ValueError):
    """Invalid simulation configuration."""


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters shared by every sampler.

    Parameters
    ----------
    seed : int
        64-bit unsigned master seed.
    dt : float
        Requested step size.  The grid uses ``n_steps = ceil(horizon / dt)``
        equal steps, so the effective step ``horizon / n_steps`` is ``<= dt``.
    horizon : float
        Final time T.
    n_samples : int
        Number of independent paths.
    n_workers : int, optional
        Threads used by the batch kernels; defaults to ``HYPERBM_WORKERS`` or 1.
        Results do not depend on it.
    """

    seed: int
    dt: float
    horizon: float
    n_samples: int = 1
    n_workers: int | None = None

    def __post_init__(self):
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= int(self.seed) < _U64:
            raise ConfigError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt!r}")
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise ConfigError(f"horizon must be positive, got {self.horizon!r}")
        if self.horizon / self.dt > MAX_STEPS:
            raise ConfigError(f"grid too large: horizon/dt = {self.horizon / self.dt:.3g} > 1e8")
        if int(self.n_samples) < 1:
            raise ConfigError("n_samples must be >= 1")
        if self.n_workers is None:
            object.__setattr__(self, "n_workers", _backend.default_workers())
        elif int(self.n_workers) < 1:
            raise ConfigError("n_workers must be >= 1")

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.horizon / self.dt - 1e-9))

    @property
    def step(self) -> float:
        """Effective grid spacing."""
        return self.horizon / self.n_steps

    def t_grid(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.step

    def with_(self, **kw) -> "SimConfig":
        d = dict(seed=self.seed, dt=self.dt, horizon=self.horizon,
                 n_samples=self.n_samples, n_workers=self.n_workers)
        d.update(kw)
        return SimConfig(**d)


def check_stream(stream_id) -> int:
    if not isinstance(stream_id, (int, np.integer)) or not 0 <= int(stream_id) < _U64:
        raise ConfigError(f"stream_id must be an integer in [0, 2**64), got {stream_id!r}")
    return int(stream_id)


@dataclass
class PathSample:
    """One discretised driving path.

    ``b`` is the driving Brownian motion and ``aux`` holds the remaining
    independent components, one row each.
    """

    t_grid: np.ndarray
    b: np.ndarray
    aux: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))

    def __post_init__(self):
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.aux = np.asarray(self.aux, dtype=float).reshape(-1, self.t_grid.size) \
            if np.size(self.aux) else np.empty((0, self.t_grid.size))
        if self.b.shape != self.t_grid.shape:
            raise ValueError("b and t_grid must have the same length")
        if self.t_grid.size == 0:
            raise ValueError("empty path")
        if np.any(np.diff(self.t_grid) <= 0):
            raise ValueError("t_grid must be strictly increasing")

    def components(self) -> np.ndarray:
        return np.vstack([self.b[None, :], self.aux])


def _bm_grid(config, n_components, stream_id, samples):
    n = config.n_steps
    samples = np.asarray(samples, dtype=np.int64)
    z = np.empty((samples.size, n_components, n))
    k = _backend.kernels()
    k.normals_into(int(config.seed), DOMAIN_PATH, stream_id, samples,
                   np.arange(n_components, dtype=np.int64), 0, z)
    out = np.zeros((samples.size, n_components, n + 1))
    np.cumsum(math.sqrt(config.step) * z, axis=2, out=out[:, :, 1:])
    return out


def sample_bm_path(config: SimConfig, n_components: int, stream_id: int, sample: int = 0) -> PathSample:
    """Sample ``n_components`` independent Brownian motions on the config grid.

    Component 0 is returned as ``b``; these are the same normals the space
    samplers consume for path index ``sample``.

    Examples
    --------
    >>> cfg = SimConfig(seed=1, dt=1.0, horizon=1.0)
    >>> p = sample_bm_path(cfg, 1, stream_id=0)
    >>> p.b.shape, p.b[0]
    ((2,), 0.0)
    """
    if int(n_components) < 1:
        raise ValueError("n_components must be >= 1")
    stream_id = check_stream(stream_id)
    w = _bm_grid(config, int(n_components), stream_id, [sample])[0]
    return PathSample(config.t_grid(), w[0], w[1:])


def sample_bm_paths(config: SimConfig, n_components: int, stream_id: int) -> np.ndarray:
    """All ``config.n_samples`` paths at once, shaped ``(samples, components, steps + 1)``."""
    stream_id = check_stream(stream_id)
    return _bm_grid(config, int(n_components), stream_id, np.arange(config.n_samples))


@dataclass
class ExpFunctionals:
    """Trapezoid values of a_t, A_t, Ã_t and the end value B_t - mu t (scalars or arrays)."""

    a_small: np.ndarray | float
    a_big: np.ndarray | float
    a_tilde: np.ndarray | float
    b_end: np.ndarray | float


def _mu_value(mu) -> float:
    mu = float(getattr(mu, "mu", mu))
    if not mu > 0:
        raise ValueError(f"drift mu must be positive, got {mu}")
    return mu


def exp_functionals(path, mu) -> ExpFunctionals:
    """Exponential functionals of ``B(s) - mu s`` along a path.

    Parameters
    ----------
    path : PathSample or (t_grid, b) tuple
        ``b`` may carry leading batch axes; the last axis is time.
    mu : float
        Drift, positive.

    Examples
    --------
    A constant-zero path with mu = 1 on [0, 1] gives ``A_1 = (1 - e^{-2}) / 2``
    up to trapezoid error.
    """
    mu = _mu_value(mu)
    if isinstance(path, PathSample):
        t, b = path.t_grid, path.b
    else:
        t, b = path
        t = np.asarray(t, dtype=float)
        b = np.asarray(b, dtype=float)
    if t.size == 0:
        raise ValueError("empty path")
    e = b - mu * t
    f1 = np.exp(e)
    dt = np.diff(t)

    def trap(f):
        return 0.5 * np.sum(dt * (f[..., :-1] + f[..., 1:]), axis=-1)

    f2 = f1 * f1
    return ExpFunctionals(trap(f1), trap(f2), trap(f2 * f2), e[..., -1])


def sample_exp_functionals(config: SimConfig, mu, stream_id: int, start: int = 0) -> ExpFunctionals:
    """Batch exponential functionals over ``config.n_samples`` fresh single-component paths."""
    mu = _mu_value(mu)
    stream_id = check_stream(stream_id)
    out = np.empty((config.n_samples, 4))
    _backend.run_split("gbm_functionals", int(config.seed), stream_id, config.n_samples,
                       (config.n_steps, config.step, mu), (out,), config.n_workers, start)
    return ExpFunctionals(out[:, 0], out[:, 1], out[:, 2], out[:, 3])


def levy_area(x, y=None):
    """Left-point (Itô) Lévy area ``1/2 ∫ (Y dX - X dY)``.

    Parameters
    ----------
    x, y : array_like
        Component paths on a shared grid (time on the last axis).  A
        ``PathSample`` may be passed alone, in which case its first two
        components are used.

    Returns
    -------
    float or ndarray
    """
    if isinstance(x, PathSample) and y is None:
        c = x.components()
        if c.shape[0] < 2:
            raise ValueError("path has fewer than two components")
        x, y = c[0], c[1]
    if isinstance(x, PathSample) or isinstance(y, PathSample):
        raise ValueError("pass two arrays or a single PathSample")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"mismatched grids: {x.shape} vs {y.shape}")
    dx = np.diff(x, axis=-1)
    dy = np.diff(y, axis=-1)
    return 0.5 * np.sum(y[..., :-1] * dx - x[..., :-1] * dy, axis=-1)


def levy_area_charfn(b, t, r_sq, dim_pairs):
    """Conditional characteristic function of ``2 S(t)`` given the endpoint norm.

    Returns ``(bt / sinh bt)^dim_pairs * exp((1 - bt coth bt) r_sq / (2 t))``,
    the value of ``E[exp(i b sum_k 2 S_k(t)) | |W(t)|^2 = r_sq]`` for
    ``dim_pairs`` independent planar Brownian motions.  Real-valued.

    Examples
    --------
    >>> round(float(levy_area_charfn(1.0, 1.0, 0.0, 1)), 6)
    0.850918
    """
    if not t > 0:
        raise ValueError("t must be positive")
    bt = np.abs(np.asarray(b, dtype=float)) * t
    small = bt < 1e-6
    safe = np.where(small, 1.0, bt)
    x2 = bt * bt
    # log(x / sinh x) and 1 - x coth x, with series near 0
    log_ratio = np.where(small, -x2 / 6.0 + x2 * x2 / 180.0,
                         np.log(safe) - (safe + np.log1p(-np.exp(-2.0 * safe)) - math.log(2.0)))
    one_minus = np.where(small, -x2 / 3.0 + x2 * x2 / 45.0, 1.0 - safe / np.tanh(safe))
    out = np.exp(dim_pairs * log_ratio + one_minus * np.asarray(r_sq, dtype=float) / (2.0 * t))
    return out if np.ndim(out) else float(out)

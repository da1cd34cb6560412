"""Vectorised Philox4x64-10 and the normal-variate mapping shared by both backends.

Every standard normal used anywhere in the package is addressed by the tuple
``(seed, domain, stream, sample, component, step)``.  The Philox counter is
``(step >> 2, component, sample, stream)`` and the key is ``(seed, domain)``;
each block of four 64-bit words yields four normals through two Box-Muller
pairs.  Because the mapping is a pure function of the address, results do not
depend on how samples are split across workers.
"""

import numpy as np

MASK64 = (1 << 64) - 1
_M32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)

PHILOX_M0 = 0xD2E7470EE14C6C93
PHILOX_M1 = 0xCA5A826395121157
PHILOX_W0 = 0x9E3779B97F4A7C15
PHILOX_W1 = 0xBB67AE8584CAA73B
ROUNDS = 10

# Domains keep unrelated uses of the same (seed, stream) apart.
DOMAIN_PATH = 0
DOMAIN_REFINE = 1
DOMAIN_RADIAL_SPLIT = 2

_TWO_PI = 2.0 * np.pi
_INV_2_53 = 1.0 / 9007199254740992.0


def _round_keys(k0, k1):
    keys = []
    for _ in range(ROUNDS):
        keys.append((np.uint64(k0), np.uint64(k1)))
        k0 = (k0 + PHILOX_W0) & MASK64
        k1 = (k1 + PHILOX_W1) & MASK64
    return keys


def _mulhilo(a, b):
    """Return (hi, lo) of the 128-bit product of the constant ``a`` and array ``b``."""
    a_lo = np.uint64(a & 0xFFFFFFFF)
    a_hi = np.uint64(a >> 32)
    b_lo = b & _M32
    b_hi = b >> _S32
    p0 = a_lo * b_lo
    p1 = a_lo * b_hi
    p2 = a_hi * b_lo
    p3 = a_hi * b_hi
    mid = (p0 >> _S32) + (p1 & _M32) + (p2 & _M32)
    hi = p3 + (p1 >> _S32) + (p2 >> _S32) + (mid >> _S32)
    lo = np.uint64(a) * b
    return hi, lo


def philox4x64(c0, c1, c2, c3, k0, k1):
    """Philox4x64-10 on broadcastable uint64 counter arrays; returns four arrays."""
    c0, c1, c2, c3 = np.broadcast_arrays(*(np.asarray(c, dtype=np.uint64) for c in (c0, c1, c2, c3)))
    c0, c1, c2, c3 = (c.copy() for c in (c0, c1, c2, c3))
    with np.errstate(over="ignore"):
        for rk0, rk1 in _round_keys(int(k0) & MASK64, int(k1) & MASK64):
            hi0, lo0 = _mulhilo(PHILOX_M0, c0)
            hi1, lo1 = _mulhilo(PHILOX_M1, c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ rk0, lo1, hi0 ^ c3 ^ rk1, lo0
    return c0, c1, c2, c3


def _uniform(x):
    return ((x >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53


def box_muller(x0, x1, x2, x3):
    """Map four 64-bit words to four standard normals (lanes 0..3)."""
    u0, u1, u2, u3 = _uniform(x0), _uniform(x1), _uniform(x2), _uniform(x3)
    r0 = np.sqrt(-2.0 * np.log(u0))
    r1 = np.sqrt(-2.0 * np.log(u2))
    t0 = _TWO_PI * u1
    t1 = _TWO_PI * u3
    return r0 * np.cos(t0), r0 * np.sin(t0), r1 * np.cos(t1), r1 * np.sin(t1)


def normal_blocks(seed, domain, stream, sample, component, block):
    """Normals for whole counter blocks; returns an array with a trailing axis of 4."""
    words = philox4x64(block, component, sample, stream, seed, domain)
    return np.stack(box_muller(*words), axis=-1)


def normals(seed, domain, stream, samples, components, step0, n_steps):
    """Normals indexed ``[sample, component, step]`` for steps ``step0 .. step0+n_steps-1``.

    ``samples`` and ``components`` are 1-d integer sequences.
    """
    samples = np.asarray(samples, dtype=np.uint64)
    components = np.asarray(components, dtype=np.uint64)
    if n_steps <= 0:
        return np.empty((samples.size, components.size, 0))
    b_first = step0 >> 2
    b_last = (step0 + n_steps - 1) >> 2
    blocks = np.arange(b_first, b_last + 1, dtype=np.uint64)
    z = normal_blocks(
        seed, domain, stream,
        samples[:, None, None], components[None, :, None], blocks[None, None, :],
    )
    z = z.reshape(samples.size, components.size, -1)
    off = step0 - 4 * b_first
    return z[:, :, off:off + n_steps]


def normal_at(seed, domain, stream, sample, component, step):
    """Single normal variate at one address (reference / debugging helper)."""
    z = normal_blocks(seed, domain, stream, sample, component, step >> 2)
    return float(np.asarray(z)[..., step & 3])

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Monte Carlo kernels.

Each kernel walks a contiguous range of sample indices and draws its noise
from the counter-based Philox4x64-10 addressing scheme described in
``hyperbm._philox``; the numpy fallback in ``hyperbm._fallback`` implements
the same arithmetic.  All loops run without the GIL.
"""

from libc.math cimport exp, log, sqrt, cos, sin, tanh, erfc, NAN
from libc.stdlib cimport malloc, free
from libc.stdint cimport uint64_t

cdef extern from *:
    """
    #include <stdint.h>
    static inline uint64_t hbm_mulhilo(uint64_t a, uint64_t b, uint64_t *hi) {
        unsigned __int128 p = (unsigned __int128)a * (unsigned __int128)b;
        *hi = (uint64_t)(p >> 64);
        return (uint64_t)p;
    }
    """
    uint64_t hbm_mulhilo(uint64_t a, uint64_t b, uint64_t *hi) nogil

cdef uint64_t PH_M0 = 0xD2E7470EE14C6C93
cdef uint64_t PH_M1 = 0xCA5A826395121157
cdef uint64_t PH_W0 = 0x9E3779B97F4A7C15
cdef uint64_t PH_W1 = 0xBB67AE8584CAA73B
cdef double INV53 = 1.0 / 9007199254740992.0
cdef double TWO_PI = 6.283185307179586

cdef uint64_t DOMAIN_PATH = 0
cdef uint64_t DOMAIN_REFINE = 1
cdef uint64_t DOMAIN_RADIAL_SPLIT = 2

cdef double RADIAL_FLOOR = 1e-12
cdef double BRIDGE_EPS = 1e-12
cdef double SQRT_HALF = 0.7071067811865476
cdef int RADIAL_MAX_DEPTH = 40


cdef struct NStream:
    uint64_t comp
    uint64_t sample
    uint64_t stream
    uint64_t k0
    uint64_t k1
    uint64_t block
    int valid
    double buf[4]


cdef inline void philox(uint64_t c0, uint64_t c1, uint64_t c2, uint64_t c3,
                        uint64_t k0, uint64_t k1, uint64_t* out) noexcept nogil:
    cdef uint64_t hi0, hi1, lo0, lo1
    cdef int r
    for r in range(10):
        lo0 = hbm_mulhilo(PH_M0, c0, &hi0)
        lo1 = hbm_mulhilo(PH_M1, c2, &hi1)
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 += PH_W0
        k1 += PH_W1
    out[0] = c0
    out[1] = c1
    out[2] = c2
    out[3] = c3


cdef inline double to_unit(uint64_t x) noexcept nogil:
    return (<double>(x >> 11) + 0.5) * INV53


cdef inline void ns_init(NStream* s, uint64_t seed, uint64_t domain, uint64_t stream,
                         uint64_t sample, uint64_t comp) noexcept nogil:
    s.comp = comp
    s.sample = sample
    s.stream = stream
    s.k0 = seed
    s.k1 = domain
    s.valid = 0


cdef inline void ns_fill(NStream* s, uint64_t block) noexcept nogil:
    cdef uint64_t w[4]
    cdef double r0, r1, t0, t1
    philox(block, s.comp, s.sample, s.stream, s.k0, s.k1, w)
    r0 = sqrt(-2.0 * log(to_unit(w[0])))
    r1 = sqrt(-2.0 * log(to_unit(w[2])))
    t0 = TWO_PI * to_unit(w[1])
    t1 = TWO_PI * to_unit(w[3])
    s.buf[0] = r0 * cos(t0)
    s.buf[1] = r0 * sin(t0)
    s.buf[2] = r1 * cos(t1)
    s.buf[3] = r1 * sin(t1)
    s.block = block
    s.valid = 1


cdef inline double ns_get(NStream* s, uint64_t step) noexcept nogil:
    cdef uint64_t b = step >> 2
    if s.valid == 0 or b != s.block:
        ns_fill(s, b)
    return s.buf[step & 3]


cdef NStream* ns_alloc(Py_ssize_t k) except NULL:
    cdef NStream* p = <NStream*> malloc(k * sizeof(NStream))
    if p == NULL:
        raise MemoryError()
    return p


def normals_into(uint64_t seed, uint64_t domain, uint64_t stream,
                 const long long[::1] samples, const long long[::1] comps,
                 long long step0, double[:, :, ::1] out):
    """Fill ``out[s, c, j]`` with the normal at (samples[s], comps[c], step0 + j)."""
    cdef Py_ssize_t i, c, j
    cdef NStream st
    with nogil:
        for i in range(samples.shape[0]):
            for c in range(comps.shape[0]):
                ns_init(&st, seed, domain, stream, <uint64_t>samples[i], <uint64_t>comps[c])
                for j in range(out.shape[2]):
                    out[i, c, j] = ns_get(&st, <uint64_t>(step0 + j))


def gbm_functionals(uint64_t seed, uint64_t stream, long long start, long long count,
                    long long nsteps, double dt, double mu, double[:, ::1] out):
    """Trapezoid exponential functionals of B(s) - mu s; columns (a, A, A~, B_T - mu T)."""
    cdef Py_ssize_t s, j
    cdef double sq = sqrt(dt), b, f1, f1n, a1, a2, a4, half = 0.5 * dt
    cdef NStream st
    with nogil:
        for s in range(count):
            ns_init(&st, seed, DOMAIN_PATH, stream, <uint64_t>(start + s), 0)
            b = 0.0
            f1 = 1.0
            a1 = 0.0
            a2 = 0.0
            a4 = 0.0
            for j in range(nsteps):
                b = b + sq * ns_get(&st, j)
                f1n = exp(b - mu * ((j + 1) * dt))
                a1 = a1 + half * (f1 + f1n)
                a2 = a2 + half * (f1 * f1 + f1n * f1n)
                a4 = a4 + half * ((f1 * f1) * (f1 * f1) + (f1n * f1n) * (f1n * f1n))
                f1 = f1n
            out[s, 0] = a1
            out[s, 1] = a2
            out[s, 2] = a4
            out[s, 3] = b - mu * (nsteps * dt)


def real_terminal(uint64_t seed, uint64_t stream, long long start, long long count,
                  long long nsteps, double dt, const double[::1] x0, double y0,
                  double[:, ::1] out_x, double[::1] out_logy):
    """Terminal state of the real half-space sampler (components: B, w_1..w_n)."""
    cdef Py_ssize_t n = x0.shape[0], s, j, i
    cdef double mu = 0.5 * n, sq = sqrt(dt), ly0 = log(y0), b, y
    cdef NStream* st = ns_alloc(n + 1)
    try:
        with nogil:
            for s in range(count):
                for i in range(n + 1):
                    ns_init(&st[i], seed, DOMAIN_PATH, stream, <uint64_t>(start + s), i)
                for i in range(n):
                    out_x[s, i] = x0[i]
                b = 0.0
                for j in range(nsteps):
                    y = exp(ly0 + b - mu * (j * dt))
                    for i in range(n):
                        out_x[s, i] = out_x[s, i] + y * (sq * ns_get(&st[i + 1], j))
                    b = b + sq * ns_get(&st[0], j)
                out_logy[s] = ly0 + b - mu * (nsteps * dt)
    finally:
        free(st)


def complex_terminal(uint64_t seed, uint64_t stream, long long start, long long count,
                     long long nsteps, double dt, double x1, double y0,
                     const double[::1] tilde0, double[::1] out_x1, double[::1] out_logy,
                     double[:, ::1] out_tilde):
    """Terminal state on H_c^n (components: B, w_2, then (w_{2k-1}, w_{2k}) per k)."""
    cdef Py_ssize_t m = tilde0.shape[0] // 2, s, j, k
    cdef Py_ssize_t ncomp = 2 * m + 2
    cdef double mu = m + 1.0, sq = sqrt(dt), ly0 = log(y0), b, y, x, dx, dy, xk, yk
    cdef NStream* st = ns_alloc(ncomp)
    try:
        with nogil:
            for s in range(count):
                for k in range(ncomp):
                    ns_init(&st[k], seed, DOMAIN_PATH, stream, <uint64_t>(start + s), k)
                for k in range(2 * m):
                    out_tilde[s, k] = tilde0[k]
                x = x1
                b = 0.0
                for j in range(nsteps):
                    y = exp(ly0 + b - mu * (j * dt))
                    x = x + (y * y) * (sq * ns_get(&st[1], j))
                    for k in range(m):
                        xk = out_tilde[s, 2 * k]
                        yk = out_tilde[s, 2 * k + 1]
                        dx = y * (sq * ns_get(&st[2 + 2 * k], j))
                        dy = y * (sq * ns_get(&st[3 + 2 * k], j))
                        x = x + (yk * dx - xk * dy)
                        out_tilde[s, 2 * k] = xk + dx
                        out_tilde[s, 2 * k + 1] = yk + dy
                    b = b + sq * ns_get(&st[0], j)
                out_x1[s] = x
                out_logy[s] = ly0 + b - mu * (nsteps * dt)
    finally:
        free(st)


def quat_terminal(uint64_t seed, uint64_t stream, long long start, long long count,
                  long long nsteps, double dt, const double[::1] head0, double y0,
                  const double[::1] tilde0, double[:, ::1] out_head, double[::1] out_logy,
                  double[:, ::1] out_tilde):
    """Terminal state on H_q^n.

    ``head0`` is (x_1, x_{n+1}, y_{n+1}); ``tilde0`` holds blocks
    (x_k, y_k, x_{n+k}, y_{n+k}).  Components: B, B_1, B_2, B_3, then four per block.
    """
    cdef Py_ssize_t m = tilde0.shape[0] // 4, s, j, k
    cdef Py_ssize_t ncomp = 4 * m + 4
    cdef double mu = 2.0 * (m + 1) + 1.0, sq = sqrt(dt), ly0 = log(y0)
    cdef double b, y, y2, h0, h1, h2, pa, pb, pc, pd, da, db, dc, dd
    cdef NStream* st = ns_alloc(ncomp)
    try:
        with nogil:
            for s in range(count):
                for k in range(ncomp):
                    ns_init(&st[k], seed, DOMAIN_PATH, stream, <uint64_t>(start + s), k)
                for k in range(4 * m):
                    out_tilde[s, k] = tilde0[k]
                h0 = head0[0]
                h1 = head0[1]
                h2 = head0[2]
                b = 0.0
                for j in range(nsteps):
                    y = exp(ly0 + b - mu * (j * dt))
                    y2 = y * y
                    h0 = h0 + y2 * (sq * ns_get(&st[1], j))
                    h1 = h1 + y2 * (sq * ns_get(&st[2], j))
                    h2 = h2 + y2 * (sq * ns_get(&st[3], j))
                    for k in range(m):
                        pa = out_tilde[s, 4 * k]
                        pb = out_tilde[s, 4 * k + 1]
                        pc = out_tilde[s, 4 * k + 2]
                        pd = out_tilde[s, 4 * k + 3]
                        da = y * (sq * ns_get(&st[4 + 4 * k], j))
                        db = y * (sq * ns_get(&st[5 + 4 * k], j))
                        dc = y * (sq * ns_get(&st[6 + 4 * k], j))
                        dd = y * (sq * ns_get(&st[7 + 4 * k], j))
                        h0 = h0 + (pb * da - pa * db + pd * dc - pc * dd)
                        h1 = h1 + (-pc * da + pa * dc + pd * db - pb * dd)
                        h2 = h2 + (-pd * da + pa * dd - pc * db + pb * dc)
                        out_tilde[s, 4 * k] = pa + da
                        out_tilde[s, 4 * k + 1] = pb + db
                        out_tilde[s, 4 * k + 2] = pc + dc
                        out_tilde[s, 4 * k + 3] = pd + dd
                    b = b + sq * ns_get(&st[0], j)
                out_head[s, 0] = h0
                out_head[s, 1] = h1
                out_head[s, 2] = h2
                out_logy[s] = ly0 + b - mu * (nsteps * dt)
    finally:
        free(st)


cdef inline double bridge_cross_prob(double d0, double d1, double h) noexcept nogil:
    """Chance that a unit Brownian bridge over ``h`` between distances d0, d1 > 0 touches the level."""
    if d0 <= 0.0 or d1 <= 0.0:
        return 1.0
    return exp(-2.0 * d0 * d1 / h)


cdef inline double bridge_uniform(NStream* s, uint64_t index) noexcept nogil:
    return 0.5 * erfc(-ns_get(s, index) * SQRT_HALF)


def real_hit(uint64_t seed, uint64_t stream, long long start, long long count,
             long long max_steps, double dt, const double[::1] x0, double y0, double a,
             int refine, double[:, ::1] out_x, double[::1] out_tau, signed char[::1] out_hit):
    """First passage of Y below ``a``.

    Steps whose Brownian-bridge crossing probability exceeds BRIDGE_EPS are split
    into ``refine`` bridge substeps, each tested the same way.
    """
    cdef Py_ssize_t n = x0.shape[0], s, i, k
    cdef long long j
    cdef double mu = 0.5 * n, sq = sqrt(dt), ly0 = log(y0), la = log(a)
    cdef double b, y, h = dt / refine, t0, frac, sd, inc, bs, lev0, lev1, p
    cdef int hit
    cdef NStream* st = ns_alloc(2 * (n + 1) + 1)
    cdef NStream* rs = st + (n + 1)
    cdef NStream* us = st + 2 * (n + 1)
    cdef double* dw = <double*> malloc(4 * (n + 1) * sizeof(double))
    cdef double* xs = dw + (n + 1)
    cdef double* remw = dw + 2 * (n + 1)
    cdef double* piece = dw + 3 * (n + 1)
    if dw == NULL:
        free(st)
        raise MemoryError()
    try:
        with nogil:
            for s in range(count):
                for i in range(n + 1):
                    ns_init(&st[i], seed, DOMAIN_PATH, stream, <uint64_t>(start + s), i)
                    ns_init(&rs[i], seed, DOMAIN_REFINE, stream, <uint64_t>(start + s), i)
                ns_init(us, seed, DOMAIN_REFINE, stream, <uint64_t>(start + s), n + 1)
                for i in range(n):
                    out_x[s, i] = x0[i]
                b = 0.0
                hit = 0
                out_tau[s] = NAN
                for j in range(max_steps):
                    y = exp(ly0 + b - mu * (j * dt))
                    for i in range(n + 1):
                        dw[i] = sq * ns_get(&st[i], j)
                    lev0 = ly0 + b - mu * (j * dt) - la
                    lev1 = ly0 + (b + dw[0]) - mu * ((j + 1) * dt) - la
                    if bridge_cross_prob(lev0, lev1, dt) > BRIDGE_EPS:
                        t0 = j * dt
                        bs = b
                        for i in range(n):
                            xs[i] = out_x[s, i]
                        for i in range(n + 1):
                            remw[i] = dw[i]
                        for k in range(1, refine + 1):
                            for i in range(n + 1):
                                if k < refine:
                                    frac = 1.0 / (refine - k + 1)
                                    sd = sqrt(h * (refine - k) * frac)
                                    inc = remw[i] * frac + sd * ns_get(&rs[i], <uint64_t>(j * refine + k))
                                else:
                                    inc = remw[i]
                                remw[i] = remw[i] - inc
                                piece[i] = inc
                            lev0 = ly0 + bs - mu * (t0 + (k - 1) * h) - la
                            for i in range(n):
                                xs[i] = xs[i] + exp(lev0 + la) * piece[i + 1]
                            bs = bs + piece[0]
                            lev1 = ly0 + bs - mu * (t0 + k * h) - la
                            p = bridge_cross_prob(lev0, lev1, h)
                            if lev1 < 0.0 or (p > BRIDGE_EPS and
                                              bridge_uniform(us, <uint64_t>(j * refine + k)) < p):
                                out_tau[s] = t0 + k * h
                                hit = 1
                                break
                        if hit:
                            for i in range(n):
                                out_x[s, i] = xs[i]
                            break
                    for i in range(n):
                        out_x[s, i] = out_x[s, i] + y * dw[i + 1]
                    b = b + dw[0]
                out_hit[s] = hit
    finally:
        free(st)
        free(dw)


cdef double radial_advance(double r, double h, double dbeta, double half_n, double noise,
                           uint64_t seed, uint64_t stream, uint64_t sample, uint64_t j,
                           uint64_t node, int depth) noexcept nogil:
    cdef double rn = r + noise * dbeta + half_n * h / tanh(r)
    cdef double db1, z
    cdef NStream st
    if rn > RADIAL_FLOOR:
        return rn
    if depth >= RADIAL_MAX_DEPTH:
        return RADIAL_FLOOR
    ns_init(&st, seed, DOMAIN_RADIAL_SPLIT, stream, sample, node)
    z = ns_get(&st, j * 4)
    db1 = 0.5 * dbeta + 0.5 * sqrt(h) * z
    r = radial_advance(r, 0.5 * h, db1, half_n, noise, seed, stream, sample, j, 2 * node, depth + 1)
    return radial_advance(r, 0.5 * h, dbeta - db1, half_n, noise, seed, stream, sample, j,
                          2 * node + 1, depth + 1)


def radial_euler(uint64_t seed, uint64_t stream, long long start, long long count,
                 long long nsteps, double dt, double n, double r0, double noise,
                 double[::1] out):
    """Euler-Maruyama for dr = d(beta) + (n/2) coth(r) dt with local step halving."""
    cdef Py_ssize_t s
    cdef long long j
    cdef double sq = sqrt(dt), r, half_n = 0.5 * n
    cdef NStream st
    with nogil:
        for s in range(count):
            ns_init(&st, seed, DOMAIN_PATH, stream, <uint64_t>(start + s), 0)
            r = r0
            for j in range(nsteps):
                r = radial_advance(r, dt, sq * ns_get(&st, j), half_n, noise, seed, stream,
                                   <uint64_t>(start + s), <uint64_t>j, 1, 0)
            out[s] = r


def gbm_upward_hit(uint64_t seed, uint64_t stream, long long start, long long count,
                   long long max_steps, double dt, double mu, double x, double z, int refine,
                   double[:, ::1] out):
    """Run x exp(B_s + mu s) up to its first passage above ``z`` (bridge-tested like ``real_hit``).

    Columns of ``out``: int X^{-2} ds, int X^{-1} ds (trapezoid), hitting time, hit flag.
    """
    cdef Py_ssize_t s, k
    cdef long long j
    cdef double sq = sqrt(dt), lx = log(x), lz = log(z), h = dt / refine
    cdef double b, lcur, lnext, i2, i1, t0, rem, frac, sd, inc, step_inc, bs, lsub, lprev, a2, a1, p
    cdef int hit
    cdef NStream st, rs, us
    with nogil:
        for s in range(count):
            ns_init(&st, seed, DOMAIN_PATH, stream, <uint64_t>(start + s), 0)
            ns_init(&rs, seed, DOMAIN_REFINE, stream, <uint64_t>(start + s), 0)
            ns_init(&us, seed, DOMAIN_REFINE, stream, <uint64_t>(start + s), 1)
            b = 0.0
            i2 = 0.0
            i1 = 0.0
            hit = 0
            out[s, 2] = NAN
            lcur = lx
            for j in range(max_steps):
                step_inc = sq * ns_get(&st, j)
                lnext = lx + (b + step_inc) + mu * ((j + 1) * dt)
                if bridge_cross_prob(lz - lcur, lz - lnext, dt) > BRIDGE_EPS:
                    t0 = j * dt
                    bs = b
                    rem = step_inc
                    lprev = lcur
                    a2 = i2
                    a1 = i1
                    for k in range(1, refine + 1):
                        if k < refine:
                            frac = 1.0 / (refine - k + 1)
                            sd = sqrt(h * (refine - k) * frac)
                            inc = rem * frac + sd * ns_get(&rs, <uint64_t>(j * refine + k))
                        else:
                            inc = rem
                        rem = rem - inc
                        bs = bs + inc
                        lsub = lx + bs + mu * (t0 + k * h)
                        a2 = a2 + 0.5 * h * (exp(-2.0 * lprev) + exp(-2.0 * lsub))
                        a1 = a1 + 0.5 * h * (exp(-lprev) + exp(-lsub))
                        p = bridge_cross_prob(lz - lprev, lz - lsub, h)
                        lprev = lsub
                        if lsub >= lz or (p > BRIDGE_EPS and bridge_uniform(&us, <uint64_t>(j * refine + k)) < p):
                            out[s, 2] = t0 + k * h
                            hit = 1
                            break
                    if hit:
                        i2 = a2
                        i1 = a1
                        break
                i2 = i2 + 0.5 * dt * (exp(-2.0 * lcur) + exp(-2.0 * lnext))
                i1 = i1 + 0.5 * dt * (exp(-lcur) + exp(-lnext))
                b = b + step_inc
                lcur = lnext
            out[s, 0] = i2
            out[s, 1] = i1
            out[s, 3] = hit

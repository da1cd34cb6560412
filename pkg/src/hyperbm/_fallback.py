"""Pure numpy implementations of the Monte Carlo kernels.

Signatures mirror ``hyperbm._ckernels`` exactly (outputs are written into
caller-provided arrays).  The ``*_paths`` functions additionally record full
grid trajectories and are what the space modules use for trajectory output,
whichever backend is active.  Samples are processed as vectors and time in
blocks; additions are accumulated in the same order as the compiled loops.
"""

import math

import numpy as np

from ._philox import DOMAIN_PATH, DOMAIN_RADIAL_SPLIT, DOMAIN_REFINE, normals, normal_at

STEP_BLOCK = 512
SAMPLE_CHUNK = 1024


def _chunks(start, count, size=SAMPLE_CHUNK):
    for lo in range(0, count, size):
        yield start + lo, lo, min(size, count - lo)


def _seq_cumsum(init, inc):
    """Sequential running sum ``init + inc[..., 0] + inc[..., 1] + ...`` along the last axis."""
    full = np.concatenate([init[..., None], inc], axis=-1)
    return np.cumsum(full, axis=-1)[..., 1:]


def normals_into(seed, domain, stream, samples, comps, step0, out):
    out[...] = normals(seed, domain, stream, samples, comps, step0, out.shape[2])


def gbm_functionals(seed, stream, start, count, nsteps, dt, mu, out):
    sq = math.sqrt(dt)
    half = 0.5 * dt
    for s0, lo, c in _chunks(start, count):
        samples = np.arange(s0, s0 + c)
        b = np.zeros(c)
        f1 = np.ones(c)
        acc = np.zeros((3, c))
        for j0 in range(0, nsteps, STEP_BLOCK):
            nb = min(STEP_BLOCK, nsteps - j0)
            dw = sq * normals(seed, DOMAIN_PATH, stream, samples, [0], j0, nb)[:, 0, :]
            bpath = _seq_cumsum(b, dw)
            t = (j0 + 1 + np.arange(nb)) * dt
            fr = np.exp(bpath - mu * t)
            fl = np.concatenate([f1[:, None], fr[:, :-1]], axis=1)
            acc[0] = _seq_cumsum(acc[0], half * (fl + fr))[:, -1]
            acc[1] = _seq_cumsum(acc[1], half * (fl * fl + fr * fr))[:, -1]
            acc[2] = _seq_cumsum(acc[2], half * ((fl * fl) * (fl * fl) + (fr * fr) * (fr * fr)))[:, -1]
            b = bpath[:, -1]
            f1 = fr[:, -1]
        out[lo:lo + c, 0:3] = acc.T
        out[lo:lo + c, 3] = b - mu * (nsteps * dt)


def real_paths(seed, stream, start, count, nsteps, dt, x0, y0, record=False):
    """Real half-space sampler; returns (x, logy) at T, or full grids if ``record``."""
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    mu = 0.5 * n
    sq = math.sqrt(dt)
    ly0 = math.log(y0)
    samples = np.arange(start, start + count)
    b = np.zeros(count)
    x = np.tile(x0, (count, 1))
    if record:
        xs = np.empty((count, nsteps + 1, n))
        lys = np.empty((count, nsteps + 1))
        xs[:, 0] = x
        lys[:, 0] = ly0
    for j0 in range(0, nsteps, STEP_BLOCK):
        nb = min(STEP_BLOCK, nsteps - j0)
        dw = sq * normals(seed, DOMAIN_PATH, stream, samples, np.arange(n + 1), j0, nb)
        bpath = _seq_cumsum(b, dw[:, 0, :])
        bleft = np.concatenate([b[:, None], bpath[:, :-1]], axis=1)
        y = np.exp(ly0 + bleft - mu * ((j0 + np.arange(nb)) * dt))
        xpath = _seq_cumsum(x, y[:, None, :] * dw[:, 1:, :])
        if record:
            xs[:, j0 + 1:j0 + nb + 1] = np.moveaxis(xpath, 1, 2)
            lys[:, j0 + 1:j0 + nb + 1] = ly0 + bpath - mu * ((j0 + 1 + np.arange(nb)) * dt)
        b = bpath[:, -1]
        x = xpath[:, :, -1]
    if record:
        return xs, lys
    return x, ly0 + b - mu * (nsteps * dt)


def real_terminal(seed, stream, start, count, nsteps, dt, x0, y0, out_x, out_logy):
    for s0, lo, c in _chunks(start, count):
        x, ly = real_paths(seed, stream, s0, c, nsteps, dt, x0, y0)
        out_x[lo:lo + c] = x
        out_logy[lo:lo + c] = ly


def complex_paths(seed, stream, start, count, nsteps, dt, x1, y0, tilde0, record=False):
    tilde0 = np.asarray(tilde0, dtype=float)
    m = tilde0.size // 2
    mu = m + 1.0
    sq = math.sqrt(dt)
    ly0 = math.log(y0)
    samples = np.arange(start, start + count)
    b = np.zeros(count)
    x = np.full(count, float(x1))
    tl = np.tile(tilde0, (count, 1))
    if record:
        xs = np.empty((count, nsteps + 1))
        lys = np.empty((count, nsteps + 1))
        ts = np.empty((count, nsteps + 1, 2 * m))
        xs[:, 0], lys[:, 0], ts[:, 0] = x, ly0, tl
    for j0 in range(0, nsteps, STEP_BLOCK):
        nb = min(STEP_BLOCK, nsteps - j0)
        dw = sq * normals(seed, DOMAIN_PATH, stream, samples, np.arange(2 * m + 2), j0, nb)
        bpath = _seq_cumsum(b, dw[:, 0, :])
        bleft = np.concatenate([b[:, None], bpath[:, :-1]], axis=1)
        y = np.exp(ly0 + bleft - mu * ((j0 + np.arange(nb)) * dt))
        d = y[:, None, :] * dw[:, 2:, :]
        tpath = _seq_cumsum(tl, d)
        tleft = np.concatenate([tl[:, :, None], tpath[:, :, :-1]], axis=2)
        terms = [(y * y) * dw[:, 1, :]]
        for k in range(m):
            xk, yk = tleft[:, 2 * k], tleft[:, 2 * k + 1]
            terms.append(yk * d[:, 2 * k] - xk * d[:, 2 * k + 1])
        inc = np.stack(terms, axis=-1).reshape(count, -1)
        xfull = _seq_cumsum(x, inc)
        xpath = xfull[:, m::m + 1]
        if record:
            xs[:, j0 + 1:j0 + nb + 1] = xpath
            lys[:, j0 + 1:j0 + nb + 1] = ly0 + bpath - mu * ((j0 + 1 + np.arange(nb)) * dt)
            ts[:, j0 + 1:j0 + nb + 1] = np.moveaxis(tpath, 1, 2)
        b = bpath[:, -1]
        x = xpath[:, -1]
        tl = tpath[:, :, -1]
    if record:
        return xs, lys, ts
    return x, ly0 + b - mu * (nsteps * dt), tl


def complex_terminal(seed, stream, start, count, nsteps, dt, x1, y0, tilde0,
                     out_x1, out_logy, out_tilde):
    for s0, lo, c in _chunks(start, count):
        x, ly, tl = complex_paths(seed, stream, s0, c, nsteps, dt, x1, y0, tilde0)
        out_x1[lo:lo + c] = x
        out_logy[lo:lo + c] = ly
        out_tilde[lo:lo + c] = tl


def quat_paths(seed, stream, start, count, nsteps, dt, head0, y0, tilde0, record=False):
    head0 = np.asarray(head0, dtype=float)
    tilde0 = np.asarray(tilde0, dtype=float)
    m = tilde0.size // 4
    mu = 2.0 * (m + 1) + 1.0
    sq = math.sqrt(dt)
    ly0 = math.log(y0)
    samples = np.arange(start, start + count)
    b = np.zeros(count)
    h = np.tile(head0, (count, 1))
    tl = np.tile(tilde0, (count, 1))
    if record:
        hs = np.empty((count, nsteps + 1, 3))
        lys = np.empty((count, nsteps + 1))
        ts = np.empty((count, nsteps + 1, 4 * m))
        hs[:, 0], lys[:, 0], ts[:, 0] = h, ly0, tl
    for j0 in range(0, nsteps, STEP_BLOCK):
        nb = min(STEP_BLOCK, nsteps - j0)
        dw = sq * normals(seed, DOMAIN_PATH, stream, samples, np.arange(4 * m + 4), j0, nb)
        bpath = _seq_cumsum(b, dw[:, 0, :])
        bleft = np.concatenate([b[:, None], bpath[:, :-1]], axis=1)
        y = np.exp(ly0 + bleft - mu * ((j0 + np.arange(nb)) * dt))
        y2 = y * y
        d = y[:, None, :] * dw[:, 4:, :]
        tpath = _seq_cumsum(tl, d)
        tleft = np.concatenate([tl[:, :, None], tpath[:, :, :-1]], axis=2)
        t0 = [y2 * dw[:, 1, :]]
        t1 = [y2 * dw[:, 2, :]]
        t2 = [y2 * dw[:, 3, :]]
        for k in range(m):
            pa, pb, pc, pd = (tleft[:, 4 * k + i] for i in range(4))
            da, db, dc, dd = (d[:, 4 * k + i] for i in range(4))
            t0.append(pb * da - pa * db + pd * dc - pc * dd)
            t1.append(-pc * da + pa * dc + pd * db - pb * dd)
            t2.append(-pd * da + pa * dd - pc * db + pb * dc)
        hpath = np.stack([
            _seq_cumsum(h[:, i], np.stack(t, axis=-1).reshape(count, -1))[:, m::m + 1]
            for i, t in enumerate((t0, t1, t2))
        ], axis=-1)
        if record:
            hs[:, j0 + 1:j0 + nb + 1] = hpath
            lys[:, j0 + 1:j0 + nb + 1] = ly0 + bpath - mu * ((j0 + 1 + np.arange(nb)) * dt)
            ts[:, j0 + 1:j0 + nb + 1] = np.moveaxis(tpath, 1, 2)
        b = bpath[:, -1]
        h = hpath[:, -1]
        tl = tpath[:, :, -1]
    if record:
        return hs, lys, ts
    return h, ly0 + b - mu * (nsteps * dt), tl


def quat_terminal(seed, stream, start, count, nsteps, dt, head0, y0, tilde0,
                  out_head, out_logy, out_tilde):
    for s0, lo, c in _chunks(start, count):
        h, ly, tl = quat_paths(seed, stream, s0, c, nsteps, dt, head0, y0, tilde0)
        out_head[lo:lo + c] = h
        out_logy[lo:lo + c] = ly
        out_tilde[lo:lo + c] = tl


def _bridge_increments(seed, stream, sample, comps, j, refine, total, dt):
    """Split the step-``j`` increments ``total`` (per component) into ``refine`` bridge pieces."""
    h = dt / refine
    rem = np.array(total, dtype=float)
    pieces = np.empty((refine, rem.size))
    for k in range(1, refine + 1):
        if k < refine:
            frac = 1.0 / (refine - k + 1)
            sd = math.sqrt(h * (refine - k) * frac)
            z = np.array([normal_at(seed, DOMAIN_REFINE, stream, sample, c, j * refine + k)
                          for c in comps])
            inc = rem * frac + sd * z
        else:
            inc = rem.copy()
        rem = rem - inc
        pieces[k - 1] = inc
    return pieces


BRIDGE_EPS = 1e-12


def _bridge_cross_prob(d0, d1, h):
    """Chance that a unit Brownian bridge over ``h`` between levels at signed distances d0, d1 > 0 touches 0."""
    with np.errstate(over="ignore", invalid="ignore"):
        return np.where((d0 > 0) & (d1 > 0), np.exp(-2.0 * d0 * d1 / h), 1.0)


def _bridge_uniform(seed, stream, sample, comp, index):
    z = normal_at(seed, DOMAIN_REFINE, stream, sample, comp, index)
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def real_hit(seed, stream, start, count, max_steps, dt, x0, y0, a, refine,
             out_x, out_tau, out_hit):
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    mu = 0.5 * n
    sq = math.sqrt(dt)
    ly0 = math.log(y0)
    la = math.log(a)
    h = dt / refine
    for s0, lo, c in _chunks(start, count):
        samples = np.arange(s0, s0 + c)
        x = np.tile(x0, (c, 1))
        b = np.zeros(c)
        active = np.ones(c, dtype=bool)
        tau = np.full(c, np.nan)
        for j0 in range(0, max_steps, STEP_BLOCK):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            nb = min(STEP_BLOCK, max_steps - j0)
            dw = sq * normals(seed, DOMAIN_PATH, stream, samples[idx], np.arange(n + 1), j0, nb)
            bpath = _seq_cumsum(b[idx], dw[:, 0, :])
            bleft = np.concatenate([b[idx, None], bpath[:, :-1]], axis=1)
            y = np.exp(ly0 + bleft - mu * ((j0 + np.arange(nb)) * dt))
            d0 = ly0 + bleft - mu * ((j0 + np.arange(nb)) * dt) - la
            d1 = ly0 + bpath - mu * ((j0 + 1 + np.arange(nb)) * dt) - la
            cand = _bridge_cross_prob(d0, d1, dt) > BRIDGE_EPS
            xpath = _seq_cumsum(x[idx], y[:, None, :] * dw[:, 1:, :])
            for r, s in enumerate(idx):
                found = False
                for jj in np.flatnonzero(cand[r]):
                    xl = xpath[r, :, jj - 1] if jj > 0 else x[s]
                    bl = bpath[r, jj - 1] if jj > 0 else b[s]
                    j = j0 + jj
                    pieces = _bridge_increments(seed, stream, int(samples[s]), range(n + 1), j,
                                                refine, dw[r, :, jj], dt)
                    xs = xl.copy()
                    bs = bl
                    t0 = j * dt
                    for k in range(1, refine + 1):
                        lev0 = ly0 + bs - mu * (t0 + (k - 1) * h) - la
                        xs = xs + math.exp(lev0 + la) * pieces[k - 1, 1:]
                        bs = bs + pieces[k - 1, 0]
                        lev1 = ly0 + bs - mu * (t0 + k * h) - la
                        p = float(_bridge_cross_prob(lev0, lev1, h))
                        if lev1 < 0 or (p > BRIDGE_EPS and
                                        _bridge_uniform(seed, stream, int(samples[s]), n + 1,
                                                        j * refine + k) < p):
                            tau[s] = t0 + k * h
                            found = True
                            break
                    if found:
                        x[s] = xs
                        active[s] = False
                        break
                if not found:
                    x[s] = xpath[r, :, -1]
                    b[s] = bpath[r, -1]
        out_x[lo:lo + c] = x
        out_tau[lo:lo + c] = tau
        out_hit[lo:lo + c] = (~active).astype(np.int8)


def _radial_advance(r, h, dbeta, half_n, noise, seed, stream, sample, j, node, depth):
    rn = r + noise * dbeta + half_n * h / math.tanh(r)
    if rn > 1e-12:
        return rn
    if depth >= 40:
        return 1e-12
    z = normal_at(seed, DOMAIN_RADIAL_SPLIT, stream, sample, node, j * 4)
    db1 = 0.5 * dbeta + 0.5 * math.sqrt(h) * z
    r = _radial_advance(r, 0.5 * h, db1, half_n, noise, seed, stream, sample, j, 2 * node, depth + 1)
    return _radial_advance(r, 0.5 * h, dbeta - db1, half_n, noise, seed, stream, sample, j,
                           2 * node + 1, depth + 1)


def radial_euler(seed, stream, start, count, nsteps, dt, n, r0, noise, out):
    sq = math.sqrt(dt)
    half_n = 0.5 * n
    for s0, lo, c in _chunks(start, count):
        samples = np.arange(s0, s0 + c)
        r = np.full(c, float(r0))
        for j0 in range(0, nsteps, STEP_BLOCK):
            nb = min(STEP_BLOCK, nsteps - j0)
            db = sq * normals(seed, DOMAIN_PATH, stream, samples, [0], j0, nb)[:, 0, :]
            for jj in range(nb):
                rn = r + noise * db[:, jj] + half_n * dt / np.tanh(r)
                bad = np.flatnonzero(rn <= 1e-12)
                for s in bad:
                    rn[s] = _radial_advance(r[s], dt, db[s, jj], half_n, noise, seed, stream,
                                            int(samples[s]), j0 + jj, 1, 0)
                r = rn
        out[lo:lo + c] = r


def gbm_upward_hit(seed, stream, start, count, max_steps, dt, mu, x, z, refine, out):
    sq = math.sqrt(dt)
    lx = math.log(x)
    lz = math.log(z)
    h = dt / refine
    for s0, lo, c in _chunks(start, count):
        samples = np.arange(s0, s0 + c)
        b = np.zeros(c)
        i2 = np.zeros(c)
        i1 = np.zeros(c)
        tau = np.full(c, np.nan)
        active = np.ones(c, dtype=bool)
        for j0 in range(0, max_steps, STEP_BLOCK):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            nb = min(STEP_BLOCK, max_steps - j0)
            dw = sq * normals(seed, DOMAIN_PATH, stream, samples[idx], [0], j0, nb)[:, 0, :]
            bpath = _seq_cumsum(b[idx], dw)
            lnext = lx + bpath + mu * ((j0 + 1 + np.arange(nb)) * dt)
            lcur = np.concatenate([(lx + b[idx] + mu * (j0 * dt))[:, None], lnext[:, :-1]], axis=1)
            if j0 == 0:
                lcur[:, 0] = lx
            cand = _bridge_cross_prob(lz - lcur, lz - lnext, dt) > BRIDGE_EPS
            t2 = 0.5 * dt * (np.exp(-2.0 * lcur) + np.exp(-2.0 * lnext))
            t1 = 0.5 * dt * (np.exp(-lcur) + np.exp(-lnext))
            c2 = _seq_cumsum(i2[idx], t2)
            c1 = _seq_cumsum(i1[idx], t1)
            for r, s in enumerate(idx):
                found = False
                for jj in np.flatnonzero(cand[r]):
                    a2 = c2[r, jj - 1] if jj > 0 else i2[s]
                    a1 = c1[r, jj - 1] if jj > 0 else i1[s]
                    bs = bpath[r, jj - 1] if jj > 0 else b[s]
                    lprev = lcur[r, jj]
                    j = j0 + jj
                    pieces = _bridge_increments(seed, stream, int(samples[s]), [0], j, refine,
                                                [dw[r, jj]], dt)[:, 0]
                    t0 = j * dt
                    for k in range(1, refine + 1):
                        bs = bs + pieces[k - 1]
                        lsub = lx + bs + mu * (t0 + k * h)
                        a2 = a2 + 0.5 * h * (math.exp(-2.0 * lprev) + math.exp(-2.0 * lsub))
                        a1 = a1 + 0.5 * h * (math.exp(-lprev) + math.exp(-lsub))
                        p = float(_bridge_cross_prob(lz - lprev, lz - lsub, h))
                        lprev = lsub
                        if lsub >= lz or (p > BRIDGE_EPS and
                                          _bridge_uniform(seed, stream, int(samples[s]), 1,
                                                          j * refine + k) < p):
                            tau[s] = t0 + k * h
                            found = True
                            break
                    if found:
                        i2[s], i1[s] = a2, a1
                        active[s] = False
                        break
                if not found:
                    i2[s], i1[s], b[s] = c2[r, -1], c1[r, -1], bpath[r, -1]
        out[lo:lo + c, 0] = i2
        out[lo:lo + c, 1] = i1
        out[lo:lo + c, 2] = tau
        out[lo:lo + c, 3] = (~active).astype(float)

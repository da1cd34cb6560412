"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0]

Both backends produce the same numbers; this only reports wall time.
"""

import argparse
import time

import numpy as np

from hyperbm import _fallback

try:
    from hyperbm import _ckernels
except ImportError:
    _ckernels = None


def cases(scale):
    c = max(1, int(2000 * scale))
    steps = 1000
    m = 4
    return {
        "gbm_functionals": (c, (steps, 1e-3, 1.0), lambda: [np.empty((c, 4))]),
        "real_terminal": (c, (steps, 1e-3, np.zeros(2), 1.0), lambda: [np.empty((c, 2)), np.empty(c)]),
        "complex_terminal": (c, (steps, 1e-3, 0.0, 1.0, np.zeros(2 * (m // 2))),
                             lambda: [np.empty(c), np.empty(c), np.empty((c, 2 * (m // 2)))]),
        "quat_terminal": (c, (steps, 1e-3, np.zeros(3), 1.0, np.zeros(4)),
                          lambda: [np.empty((c, 3)), np.empty(c), np.empty((c, 4))]),
        "real_hit": (c, (20_000, 1e-3, np.zeros(3), 1.0, 0.5, 8),
                     lambda: [np.empty((c, 3)), np.empty(c), np.empty(c, dtype=np.int8)]),
        "radial_euler": (c, (steps, 1e-3, 2.0, 0.5, 1.0), lambda: [np.empty(c)]),
        "gbm_upward_hit": (c, (20_000, 1e-3, 1.0, 1.0, 2.0, 8), lambda: [np.empty((c, 4))]),
    }


def bench(mod, name, count, args, make, repeat):
    best = float("inf")
    for _ in range(repeat):
        outs = make()
        t = time.perf_counter()
        getattr(mod, name)(7, 1, 0, count, *args, *outs)
        best = min(best, time.perf_counter() - t)
    return best, outs


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0, help="multiplies the sample count")
    args = ap.parse_args(argv)
    print(f"{'kernel':18s} {'samples':>8s} {'python [s]':>11s} {'compiled [s]':>13s} {'speed-up':>9s} {'max rel diff':>13s}")
    for name, (count, kargs, make) in cases(args.scale).items():
        tp, op = bench(_fallback, name, count, kargs, make, args.repeat)
        if _ckernels is None:
            print(f"{name:18s} {count:8d} {tp:11.3f} {'n/a':>13s}")
            continue
        tc, oc = bench(_ckernels, name, count, kargs, make, args.repeat)
        diff = max(float(np.nanmax(np.abs(a - b) / np.maximum(1.0, np.abs(a))))
                   if a.size else 0.0 for a, b in zip(op, oc))
        print(f"{name:18s} {count:8d} {tp:11.3f} {tc:13.3f} {tp / tc:9.1f} {diff:13.2e}")


if __name__ == "__main__":
    main()

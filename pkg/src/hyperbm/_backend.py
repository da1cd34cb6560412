"""Kernel backend selection and sample-range parallelism.

``HYPERBM_BACKEND`` picks the implementation: ``auto`` (default; compiled if
importable), ``compiled`` (error if missing) or ``python``.
``HYPERBM_WORKERS`` sets the default worker count.
"""

import os
from concurrent.futures import ThreadPoolExecutor

from . import _fallback

try:
    from . import _ckernels
except ImportError:  # pragma: no cover - depends on build
    _ckernels = None


def _select(name):
    name = (name or "auto").lower()
    if name == "python":
        return _fallback
    if name == "compiled":
        if _ckernels is None:
            raise ImportError("compiled kernels requested but hyperbm._ckernels is not built")
        return _ckernels
    if name != "auto":
        raise ValueError(f"unknown backend {name!r}")
    return _ckernels if _ckernels is not None else _fallback


_active = _select(os.environ.get("HYPERBM_BACKEND"))


def kernels():
    return _active


def backend_name():
    return "compiled" if _active is _ckernels else "python"


def set_backend(name):
    """Switch backend at runtime; returns the previous backend name."""
    global _active
    prev = backend_name()
    _active = _select(name)
    return prev


def compiled_available():
    return _ckernels is not None


def default_workers():
    try:
        return max(1, int(os.environ.get("HYPERBM_WORKERS", "1")))
    except ValueError:
        return 1


def run_split(name, seed, stream, count, args, outs, n_workers=None, start=0):
    """Call kernel ``name`` over samples ``start .. start+count-1`` split across workers.

    ``outs`` are C-contiguous arrays with leading dimension ``count``; each worker
    gets a contiguous row slice.  Since every sample draws from its own counter
    range, the result does not depend on ``n_workers``.
    """
    fn = getattr(_active, name)
    if n_workers is None:
        n_workers = default_workers()
    n_workers = max(1, min(int(n_workers), count))
    if n_workers == 1:
        fn(seed, stream, start, count, *args, *outs)
        return
    bounds = [count * i // n_workers for i in range(n_workers + 1)]

    def job(i):
        lo, hi = bounds[i], bounds[i + 1]
        fn(seed, stream, start + lo, hi - lo, *args, *(o[lo:hi] for o in outs))

    with ThreadPoolExecutor(n_workers) as ex:
        list(ex.map(job, range(n_workers)))

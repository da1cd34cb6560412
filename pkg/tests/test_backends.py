import numpy as np
import pytest

from hyperbm import _backend, _fallback
from hyperbm.core import SimConfig
from hyperbm.real_space import RealPoint, sample_real_terminal
from hyperbm.verify import determinism_campaign

ck = pytest.importorskip("hyperbm._ckernels")

SEED, STREAM, START, COUNT = 12345, 3, 17, 40


def run(mod, name, args, outs):
    outs = [np.zeros_like(o) for o in outs]
    getattr(mod, name)(SEED, STREAM, START, COUNT, *args, *outs)
    return outs


CASES = {
    "gbm_functionals": ((300, 0.01, 0.8), [np.zeros((COUNT, 4))]),
    "real_terminal": ((250, 0.01, np.array([0.1, -0.2, 0.3]), 1.3),
                      [np.zeros((COUNT, 3)), np.zeros(COUNT)]),
    "complex_terminal": ((250, 0.01, 0.2, 0.9, np.array([0.1, 0.2, -0.3, 0.4])),
                         [np.zeros(COUNT), np.zeros(COUNT), np.zeros((COUNT, 4))]),
    "quat_terminal": ((250, 0.01, np.array([0.1, 0.2, 0.3]), 0.9, np.arange(8) / 10.0),
                      [np.zeros((COUNT, 3)), np.zeros(COUNT), np.zeros((COUNT, 8))]),
    "real_hit": ((3000, 1e-3, np.array([0.0, 0.5]), 1.0, 0.6, 8),
                 [np.zeros((COUNT, 2)), np.zeros(COUNT), np.zeros(COUNT, dtype=np.int8)]),
    "radial_euler": ((400, 2.5e-3, 2.0, 0.05, 1.0), [np.zeros(COUNT)]),
    "gbm_upward_hit": ((3000, 1e-3, 1.0, 1.0, 1.4, 8), [np.zeros((COUNT, 4))]),
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_backends_agree(name):
    args, outs = CASES[name]
    a = run(_fallback, name, args, outs)
    b = run(ck, name, args, outs)
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, rtol=1e-10, atol=1e-12)


def test_normals_identical():
    samples = np.array([0, 7, 2**40], dtype=np.int64)
    comps = np.array([0, 3], dtype=np.int64)
    a = np.empty((3, 2, 13))
    b = np.empty((3, 2, 13))
    _fallback.normals_into(SEED, 1, STREAM, samples, comps, 5, a)
    ck.normals_into(SEED, 1, STREAM, samples, comps, 5, b)
    np.testing.assert_array_equal(a, b)


def test_set_backend_roundtrip():
    prev = _backend.set_backend("python")
    try:
        assert _backend.backend_name() == "python"
        with pytest.raises(ValueError):
            _backend.set_backend("fortran")
    finally:
        _backend.set_backend(prev)
    assert _backend.backend_name() == prev


def test_worker_env_default(monkeypatch):
    monkeypatch.setenv("HYPERBM_WORKERS", "3")
    assert _backend.default_workers() == 3
    monkeypatch.setenv("HYPERBM_WORKERS", "zero")
    assert _backend.default_workers() == 1


def test_start_offset_selects_rows():
    z0 = RealPoint([0.0, 0.0], 1.0)
    cfg = SimConfig(2, 0.05, 1.0, 10)
    full = sample_real_terminal(z0, cfg, 4)
    tail = sample_real_terminal(z0, cfg.with_(n_samples=4), 4, start=6)
    np.testing.assert_array_equal(full.x[6:], tail.x)


def test_determinism_and_worker_independence(backend):
    for rep in determinism_campaign(seed=11):
        assert rep.passed, rep.name

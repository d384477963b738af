"""The compiled kernels and the pure-Python fallback must agree bit for bit."""

import os

import numpy as np
import pytest

from stochquant import _backend, _fallback

kernels = pytest.importorskip("stochquant._kernels")


def test_backend_selected():
    forced = os.environ.get("STOCHQUANT_PURE_PYTHON") in ("1", "true", "yes")
    assert _backend.BACKEND == ("python" if forced else "cython")


@pytest.mark.parametrize("K", [1, 2, 7, 36])
def test_assign_identical(K):
    rng = np.random.default_rng(K)
    pts = rng.random((3000, 3))
    pal = rng.random((K, 3))
    pal[-1] = pal[0]  # exact tie must go to the lower index in both
    la, sa = kernels.assign_nearest(pts, pal)
    lb, sb = _fallback.assign_nearest(pts, pal)
    assert np.array_equal(la, lb) and sa.tobytes() == sb.tobytes()


@pytest.mark.parametrize("r", [2.0, 2.5, 3.0, 4.0])
@pytest.mark.parametrize("rho", [0.001, 0.3])
def test_sq_iterate_identical(r, rho):
    rng = np.random.default_rng(int(r * 10))
    pts = np.vstack([rng.random((2000, 3)), rng.random((5, 3))])
    pal = rng.random((6, 3))
    pal[:5] = pts[-5:]  # exercise zero-distance samples
    idx = rng.integers(0, len(pts), 30_000).astype(np.int64)
    a, b = pal.copy(), pal.copy()
    kernels.sq_iterate(pts, a, idx, rho, r)
    _fallback.sq_iterate(pts, b, idx, rho, r)
    assert a.tobytes() == b.tobytes()
    assert a.min() >= 0.0 and a.max() <= 1.0

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from klab import kernels
from klab._kernels_py import interp as py_interp, orbit_sum as py_orbit_sum, winding_gather as py_gather

backends = ["python"] + (["cython"] if kernels.compiled_available() else [])


@pytest.mark.parametrize("name", backends)
@settings(max_examples=60, deadline=None)
@given(st.integers(2, 64), st.booleans(), st.integers(0, 2**31))
def test_interp_matches_numpy(name, n, periodic, seed):
    rng = np.random.default_rng(seed)
    s = rng.standard_normal(n if periodic else n + 1)
    x = rng.uniform(0, 1, 50)
    xp = np.arange(n + 1) / n
    fp = np.append(s, s[0]) if periodic else s
    got = kernels.get_backend(name).interp(s, periodic, x)
    assert np.allclose(got, np.interp(x, xp, fp), atol=1e-12)


@pytest.mark.parametrize("name", backends)
@settings(max_examples=60, deadline=None)
@given(st.integers(1, 300), st.integers(2, 64), st.data())
def test_orbit_sum_brute_force(name, order, n, data):
    start = data.draw(st.integers(0, order - 1))
    stop = data.draw(st.integers(start + 1, order + 3))
    stride = data.draw(st.integers(0, order - 1))
    rng = np.random.default_rng(order * 1000 + n)
    s = rng.standard_normal((2, n))
    pts = [((stride * j) % order) / order for j in range(start, stop)]
    expect = [sum(np.interp(p, np.arange(n + 1) / n, np.append(row, row[0])) for p in pts) for row in s]
    got = kernels.get_backend(name).orbit_sum(s, order, start, stop, stride)
    assert np.allclose(got, expect, atol=1e-9)


@pytest.mark.parametrize("name", backends)
@given(st.integers(-50, 50), st.integers(2, 64))
def test_winding_gather(name, w, n):
    s = np.arange(n, dtype=float) ** 2
    got = kernels.get_backend(name).winding_gather(s, w % n, n, n + 1)
    assert got.tolist() == [s[(w * k) % n] for k in range(n + 1)]


@pytest.mark.skipif(not kernels.compiled_available(), reason="compiled kernels not built")
def test_backends_agree_on_large_orbit():
    rng = np.random.default_rng(1)
    s = rng.standard_normal((3, 4096))
    a = kernels.get_backend("cython").orbit_sum(s, 16806, 1, 16806, 5)
    b = py_orbit_sum(s, 16806, 1, 16806, 5)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-9)


def test_wrapper_scalar_and_overflow():
    s = np.ones(16)
    assert kernels.orbit_sum(s, 7, 0, 7) == pytest.approx(7.0)
    with pytest.raises(OverflowError):
        kernels.orbit_sum(s, 2**31, 0, 2)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_fallback_functions_importable():
    assert callable(py_interp) and callable(py_gather)


def test_env_forces_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, KLAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import klab; print(klab.BACKEND)"], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"

import os
import subprocess
import sys

import numpy as np
import pytest

from caustica import _core
from caustica._core import _fallback
from caustica.classical import solve_fundamental
from caustica.oracle import GridState, propagate
from caustica.slit import SlitSetup, initial_state
from caustica.timefun import Constant, Polynomial

needs_ext = pytest.mark.skipif("cython" not in _core.backends(), reason="extension not built")


def test_backend_name():
    assert _core.BACKEND in ("cython", "python")
    assert "python" in _core.backends()


def test_pure_env_forces_fallback():
    env = dict(os.environ, CAUSTICA_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import caustica; print(caustica.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_ext
def test_rk4_backends_agree():
    rng = np.random.default_rng(1)
    n = 500
    args = [np.ascontiguousarray(rng.uniform(-2, 5, n)) for _ in range(6)]
    y0 = np.array([0.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    ext = _core.backends()["cython"].rk4_linear(*args, 0.01, y0)
    ref = _fallback.rk4_linear(*args, 0.01, y0)
    assert np.allclose(ext, ref, rtol=1e-13, atol=1e-13)


@needs_ext
def test_cn_backends_agree():
    x = np.linspace(-10, 10, 1024)
    psi = initial_state(SlitSetup(0.5, 0.8, 2.0))(x)
    lam = np.linspace(0.5, 1.5, 200)
    mu = np.concatenate([np.full(100, 0.1), np.full(100, -0.3)])
    dt, dx = 0.01, float(x[1] - x[0])
    ext = _core.backends()["cython"].cn_propagate(psi, x, lam, mu, dt, 1.0, dx)
    ref = _fallback.cn_propagate(psi, x, lam, mu, dt, 1.0, dx)
    assert np.max(np.abs(ext - ref)) <= 1e-10


def test_results_independent_of_backend(pure_backend):
    pair = solve_fundamental(Polynomial([1.0, 0.3]), Constant(0.2), 2.0)
    st = GridState.from_function(initial_state(SlitSetup(0.3, 0.7)), -9, 9, 512)
    out = propagate(st, Constant(1.0), None, 0.0, 1.0, n_steps=128)
    assert _core.BACKEND == "python"
    assert abs(pair.wronskian_drift) <= 1e-9
    assert np.all(np.isfinite(out.psi))


@needs_ext
def test_pipeline_agrees_across_backends(monkeypatch):
    def run():
        pair = solve_fundamental(Polynomial([1.0, 0.3]), Constant(0.2), 2.0)
        st = GridState.from_function(initial_state(SlitSetup(0.3, 0.7)), -9, 9, 512)
        out = propagate(st, Constant(1.0), None, 0.0, 1.0, n_steps=128)
        return pair.u.y, out.psi

    u1, p1 = run()
    monkeypatch.setattr(_core, "rk4_linear", _fallback.rk4_linear)
    monkeypatch.setattr(_core, "cn_propagate", _fallback.cn_propagate)
    u2, p2 = run()
    assert np.allclose(u1, u2, rtol=1e-13, atol=1e-14)
    assert np.max(np.abs(p1 - p2)) <= 1e-11

"""The compiled kernels and the pure-Python fallback must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from swipt_re import _kernels_py as py
from swipt_re import kernels

compiled = pytest.importorskip("swipt_re._kernels")


@pytest.mark.parametrize("seed", range(8))
def test_spectral_ellipsoid_equivalent(seed):
    rng = np.random.default_rng(seed)
    n = rng.integers(1, 5)
    a = rng.uniform(0.1, 5.0, n)
    b = a if seed % 2 else rng.uniform(0.1, 5.0, n)
    power = 2.0
    q = 0.7 * power * b.max()
    args = (a, b, power, q, 1e-9, 5000, 0.1, 1.0, 50.0)
    r1, r2 = py.spectral_dual_ellipsoid(*args), compiled.spectral_dual_ellipsoid(*args)
    np.testing.assert_allclose(r1[2], r2[2], rtol=1e-10, atol=1e-12)
    assert r1[4] == r2[4] and r1[5] == r2[5]
    assert r1[3] == pytest.approx(r2[3], rel=1e-12)


@pytest.mark.parametrize("n,steps", [(1, 50), (2, 200), (3, 60), (4, 20)])
def test_simplex_grid_equivalent(n, steps):
    rng = np.random.default_rng(n)
    a, b = rng.uniform(0.1, 3, n), rng.uniform(0.1, 3, n)
    q = 0.5 * b.max()
    r1, k1 = py.simplex_grid_search(a, b, 1.0, q, steps)
    r2, k2 = compiled.simplex_grid_search(a, b, 1.0, q, steps)
    assert r1 == pytest.approx(r2, abs=1e-12)
    np.testing.assert_array_equal(k1, k2)


def test_simplex_grid_infeasible():
    for mod in (py, compiled):
        r, k = mod.simplex_grid_search([1.0, 1.0], [1.0, 1.0], 1.0, 5.0, 10)
        assert r == -np.inf and np.all(k == -1)


@pytest.mark.parametrize("use_imag", [False, True])
def test_bloch_grid_equivalent(use_imag):
    rng = np.random.default_rng(3)
    h = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    k, j = h.conj().T @ h, g.conj().T @ g
    args = (k, j, 1.0, 0.5 * np.linalg.eigvalsh(j)[-1], (0.0, 0.0, 0.0), 1.0, 21, use_imag)
    r1, r2 = py.bloch_grid_search(*args), compiled.bloch_grid_search(*args)
    np.testing.assert_allclose(r1, r2, rtol=1e-12, atol=1e-14)


def test_backend_selection_env():
    code = "from swipt_re import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, SWIPT_RE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
    assert kernels.BACKEND in ("compiled", "python")


def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    if mod._kernels is None:
        pytest.skip("compiled extension not built")
    mod.main(["--quick", "--repeat", "1"])
    assert "simplex_grid_search" in capsys.readouterr().out

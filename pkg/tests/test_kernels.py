"""Parity of the compiled and pure-Python kernels."""
import importlib
import math

import numpy as np
import pytest

from slcurv import _kernels_py as py
from slcurv import kernels

try:
    cy = importlib.import_module("slcurv._kernels")
except ImportError:  # extension not built
    cy = None

needs_ext = pytest.mark.skipif(cy is None, reason="compiled extension not built")


def _spd_stack(rng, m, n):
    b = rng.normal(size=(m, n, n))
    return b @ np.swapaxes(b, 1, 2) + 0.1 * np.eye(n)


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")
    assert py.BACKEND == "python"


def test_python_jacobi_frozen():
    w, v = py.jacobi_eigh(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(w, [1.0, 3.0], atol=1e-15)
    assert abs(abs(v[0, 0]) - 1 / math.sqrt(2)) < 1e-15


def test_python_invert_angle_frozen():
    assert abs(py.invert_angle(np.array([1.0, 1.0, 1.0]), math.pi) - math.sqrt(3)) < 1e-15
    out = py.invert_angle_batch(np.array([[1.0, 2.0, 3.0], [1.0, 1.0, 1.0]]), np.array([math.pi, math.pi]))
    assert np.allclose(out, [1.0, math.sqrt(3)], rtol=1e-15)


def test_elem_sym():
    assert np.array_equal(py.elem_sym(np.array([1.0, 2.0, 3.0])), [1.0, 6.0, 11.0, 6.0])


@needs_ext
def test_parity_eigen(rng):
    for n in (1, 2, 3, 5, 8):
        a = _spd_stack(rng, 1, n)[0]
        w1, v1 = cy.jacobi_eigh(a)
        w2, v2 = py.jacobi_eigh(a)
        assert np.max(np.abs(w1 - w2)) <= 1e-13 * np.abs(w2).max()
        assert np.max(np.abs(np.abs(v1.T @ v2) - np.eye(n))) < 1e-8
    stack = _spd_stack(rng, 100, 4)
    assert np.max(np.abs(cy.jacobi_eigh_batch(stack) - py.jacobi_eigh_batch(stack))) < 1e-12


def test_python_eigvalsh_frozen():
    assert np.allclose(py.eigvalsh(np.array([[2.0, 1.0], [1.0, 2.0]])), [1.0, 3.0], atol=1e-15)


@needs_ext
def test_parity_eigvalsh(rng):
    for n in (1, 2, 3, 5, 8):
        a = _spd_stack(rng, 1, n)[0]
        w = py.eigvalsh(a)
        assert np.max(np.abs(cy.eigvalsh(a) - w)) <= 1e-13 * np.abs(w).max()
        assert np.array_equal(cy.eigvalsh(a), cy.jacobi_eigh(a)[0])


@needs_ext
def test_parity_angles(rng):
    w = np.sort(np.exp(rng.uniform(-2.3, 2.3, size=(500, 4))), axis=1)
    th = rng.uniform(0.1, 2 * math.pi - 0.1, size=500)
    r1 = cy.invert_angle_batch(w, th)
    r2 = py.invert_angle_batch(w, th)
    assert np.max(np.abs(r1 - r2) / r2) < 1e-13
    assert np.max(np.abs(cy.sl_angle_batch(w, r1) - py.sl_angle_batch(w, r1))) < 1e-14
    for i in range(0, 500, 50):
        assert abs(cy.invert_angle(w[i], th[i]) - py.invert_angle(w[i], th[i])) < 1e-13 * r2[i]
        assert abs(cy.sl_angle(w[i], 1.3) - py.sl_angle(w[i], 1.3)) < 1e-15
        assert np.allclose(cy.elem_sym(w[i]), py.elem_sym(w[i]), rtol=1e-14)


def test_forced_fallback_env(monkeypatch):
    import slcurv.kernels as k

    monkeypatch.setenv("SLCURV_PURE_PYTHON", "1")
    mod = importlib.reload(k)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("SLCURV_PURE_PYTHON")
        importlib.reload(k)

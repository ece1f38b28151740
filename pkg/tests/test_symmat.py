import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from slcurv.errors import DomainError, InvalidInputError
from slcurv.symmat import SymMatrix, complex_det, eigen_sym, eigenvalues_batch


def test_symmetrizes_on_construction():
    a = SymMatrix([[1.0, 2.0], [0.0, 3.0]])
    assert np.array_equal(a.entries, [[1.0, 1.0], [1.0, 3.0]])
    assert not a.entries.flags.writeable


def test_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        SymMatrix(np.ones((2, 3)))
    with pytest.raises(InvalidInputError):
        SymMatrix([[1.0, np.nan], [0.0, 1.0]])


def test_chi_of_diag_123():
    sp = eigen_sym(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(sp.eigenvalues, [1.0, 2.0, 3.0], atol=1e-15)
    assert np.allclose(sp.chi, [1.0, 6.0, 11.0, 6.0], atol=1e-13)
    # det(I + t A) at t = 1 is 2 * 3 * 4
    assert abs(sp.char_poly(1.0) - 24.0) < 1e-12


def test_complex_det_frozen():
    mod, arg = complex_det(np.diag([1.0, 2.0, 3.0]), 1.0)
    assert abs(mod - math.sqrt(2 * 5 * 10)) < 1e-12
    assert abs(arg - math.pi) < 1e-14
    with pytest.raises(DomainError):
        complex_det(np.eye(2), 0.0)


def test_complex_det_matches_numpy(rng):
    for _ in range(20):
        b = rng.normal(size=(4, 4))
        a = b + b.T
        r = float(rng.uniform(0.1, 3.0))
        mod, arg = complex_det(a, r)
        d = np.linalg.det(np.eye(4) + 1j * r * a)
        assert abs(mod - abs(d)) < 1e-10 * abs(d)
        assert abs(np.exp(1j * arg) - d / abs(d)) < 1e-10


def test_batch_eigenvalues(rng):
    b = rng.normal(size=(50, 5, 5))
    stack = b + np.swapaxes(b, 1, 2)
    assert np.max(np.abs(eigenvalues_batch(stack) - np.linalg.eigvalsh(stack))) < 1e-12


@given(arrays(float, (3, 3), elements=st.floats(-5, 5)))
def test_eigen_reconstructs(m):
    a = SymMatrix(m)
    sp = eigen_sym(a)
    rec = sp.vectors @ np.diag(sp.eigenvalues) @ sp.vectors.T
    assert np.max(np.abs(rec - a.entries)) <= 1e-12 * (1 + np.abs(m).max())
    assert np.all(np.diff(sp.eigenvalues) >= 0)

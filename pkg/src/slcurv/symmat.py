"""Symmetric matrices, their spectra and the complex determinant det(I + i r A)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError, InvalidInputError


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric ``n x n`` matrix; symmetrized on construction."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidInputError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.isfinite(a).all():
            raise InvalidInputError("matrix has non-finite entries")
        a += a.T
        a *= 0.5
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def diag(cls, values) -> "SymMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls(np.eye(n))

    def scaled(self, s: float) -> "SymMatrix":
        return SymMatrix(s * self.entries)

    def conjugated(self, q: np.ndarray) -> "SymMatrix":
        """Return ``q.T @ A @ q``."""
        q = np.asarray(q, dtype=float)
        return SymMatrix(q.T @ self.entries @ q)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def as_sym(a) -> SymMatrix:
    return a if isinstance(a, SymMatrix) else SymMatrix(a)


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    chi: np.ndarray
    vectors: np.ndarray = field(default=None, repr=False)

    def char_poly(self, t: float) -> float:
        """``det(I + t A)`` evaluated from the higher principal curvatures."""
        return float(np.polyval(self.chi[::-1], t))

    @property
    def is_positive_definite(self) -> bool:
        return bool(self.eigenvalues[0] > 0.0)


def eigen_sym(a) -> Spectrum:
    """Ascending eigenvalues, eigenvectors and chi_0..chi_n of a symmetric matrix."""
    a = as_sym(a)
    w, v = kernels.jacobi_eigh(a.entries)
    return Spectrum(eigenvalues=w, chi=kernels.elem_sym(w), vectors=v)


def eigenvalues_sym(a) -> np.ndarray:
    """Ascending eigenvalues only; skips eigenvectors and chi."""
    return kernels.eigvalsh(as_sym(a).entries)


def eigenvalues_batch(stack) -> np.ndarray:
    """Ascending eigenvalues of a stack of symmetric matrices, shape ``(m, n)``."""
    stack = np.asarray(stack, dtype=float)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise InvalidInputError("expected an (m, n, n) stack")
    if not np.all(np.isfinite(stack)):
        raise InvalidInputError("matrix stack has non-finite entries")
    stack = 0.5 * (stack + np.swapaxes(stack, 1, 2))
    return kernels.jacobi_eigh_batch(stack)


def complex_det(a, r: float) -> tuple[float, float]:
    """Modulus and continuous argument of ``det(I + i r A)``.

    The argument is the branch vanishing at ``A = 0``, i.e. the sum of
    ``atan(r * lambda_i)``, and lies in ``(-n pi/2, n pi/2)``.
    """
    if not r > 0.0:
        raise DomainError(f"r must be positive, got {r}")
    w = eigen_sym(a).eigenvalues
    modulus = math.prod(math.sqrt(1.0 + (r * lam) ** 2) for lam in w)
    return modulus, kernels.sl_angle(w, r)

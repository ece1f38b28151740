"""Special Lagrangian curvature of shape operators.

``sl_value(A, r)`` is the argument of ``det(I + i r A)``; for a positive
definite ``A`` it increases strictly from 0 to ``n pi/2`` in ``r``, so each
angle ``theta`` in that range fixes a unique radius ``r_theta(A, theta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError
from .symmat import as_sym, eigen_sym, eigenvalues_sym

__all__ = [
    "sl_value",
    "r_theta",
    "r_theta_batch",
    "weingarten_residual",
    "special_angle_root",
    "special_angle_poly",
    "gaussian_identities",
    "GaussianChecks",
]


def _check_r(r):
    if not (r > 0.0 and math.isfinite(r)):
        raise DomainError(f"r must be a positive finite number, got {r}")


def _check_theta(theta, n):
    if not (0.0 < theta < n * math.pi / 2):
        raise DomainError(f"theta={theta} outside (0, {n}*pi/2)")


def _positive_spectrum(a):
    w = eigenvalues_sym(a)
    if not w[0] > 0.0:
        raise DomainError(f"matrix is not positive definite (lambda_min={w[0]:.3g})")
    return w


def sl_value(a, r: float) -> float:
    """Sum of ``atan(r * lambda_i)`` over the eigenvalues of ``a``."""
    _check_r(r)
    return kernels.sl_angle(eigenvalues_sym(a), r)


def r_theta(a, theta: float) -> float:
    """Unique ``r > 0`` with ``sl_value(a, r) == theta`` (``a`` positive definite)."""
    a = as_sym(a)
    _check_theta(theta, a.dim)
    w = _positive_spectrum(a)
    return kernels.invert_angle(w, theta)


def r_theta_batch(eigenvalues, thetas) -> np.ndarray:
    """Vectorized inversion from precomputed spectra, one row per matrix."""
    w = np.atleast_2d(np.asarray(eigenvalues, dtype=float))
    th = np.broadcast_to(np.asarray(thetas, dtype=float), (w.shape[0],))
    n = w.shape[1]
    if np.any(w.min(axis=1) <= 0.0):
        raise DomainError("all spectra must be positive")
    if np.any((th <= 0.0) | (th >= n * math.pi / 2)):
        raise DomainError(f"theta outside (0, {n}*pi/2)")
    return kernels.invert_angle_batch(w, np.ascontiguousarray(th))


def weingarten_residual(a, rho: float, theta: float) -> float:
    """Weingarten-polynomial form of the condition ``SL_rho(A) = theta (mod pi)``.

    Equals ``Im(exp(-i theta) det(I + i rho A))``.
    """
    _check_r(rho)
    chi = eigen_sym(a).chi
    even = sum((-1) ** k * rho ** (2 * k) * chi[2 * k] for k in range((len(chi) + 1) // 2))
    odd = sum((-1) ** k * rho ** (2 * k + 1) * chi[2 * k + 1] for k in range(len(chi) // 2))
    return math.sin(theta) * even - math.cos(theta) * odd


def special_angle_poly(chi) -> np.ndarray:
    """Coefficients (highest degree first) of ``sum_j (-1)^j chi_{n-2j} r^{n-2j}``."""
    n = len(chi) - 1
    coeffs = np.zeros(n + 1)
    for j in range(n // 2 + 1):
        # coeffs[0] multiplies r**n
        coeffs[2 * j] = (-1) ** j * chi[n - 2 * j]
    return coeffs


def special_angle_root(a) -> float:
    """Radius at which ``SL_r(A) = (n-1) pi/2``, from the higher principal curvatures.

    For ``n >= 4`` the polynomial also vanishes where the angle equals
    ``(n-3) pi/2, (n-5) pi/2, ...``; the largest positive root is the one
    sought since the angle increases with ``r``.
    """
    a = as_sym(a)
    if a.dim < 2:
        raise DomainError("special angle (n-1)pi/2 needs n >= 2")
    _positive_spectrum(a)
    chi = eigen_sym(a).chi
    coeffs = special_angle_poly(chi)
    dcoeffs = np.polyder(coeffs)
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) <= 1e-6 * np.maximum(1.0, np.abs(roots))].real
    r = float(np.max(real[real > 0.0]))
    for _ in range(50):
        step = np.polyval(coeffs, r) / np.polyval(dcoeffs, r)
        r -= step
        if abs(step) <= 1e-15 * r:
            break
    return float(r)


@dataclass(frozen=True)
class GaussianChecks:
    k_check: float | None
    kh_check: float | None


def gaussian_identities(a) -> GaussianChecks:
    """Low-dimensional identities: ``R_{pi/2}^-2 = K`` (n=2), ``R_pi^-2 = K/H`` (n=3).

    ``H`` is the trace of the shape operator (unnormalized mean curvature).
    """
    a = as_sym(a)
    n = a.dim
    if n not in (2, 3):
        raise DomainError(f"identities are stated for n in (2, 3), got n={n}")
    w = _positive_spectrum(a)
    det = float(np.prod(w))
    if n == 2:
        r = kernels.invert_angle(w, math.pi / 2)
        return GaussianChecks(k_check=r ** -2 - det, kh_check=None)
    r = kernels.invert_angle(w, math.pi)
    return GaussianChecks(k_check=None, kh_check=r ** -2 - det / float(np.sum(w)))

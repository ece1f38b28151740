"""Normal variations of hypersurfaces and the linearized SL operator.

For a patch ``i`` with exterior normal ``N`` and a function ``f`` on the
chart, ``i_{f,t}(u) = Exp_{i(u)}(t f(u) N(u))``. Along this family the
Weingarten map varies as ``dA/dt = f W - Hess f - f A^2`` with
``W(u) = R(N, u) N``, and

    d/dt Im(e^{-i theta} det(I + i rho A_t)) at t = 0
        = sqrt(det(I + rho^2 A^2)) * rho * tr((I + rho^2 A^2)^{-1} dA/dt)

whenever ``SL_rho(A) = theta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .ambient import SpaceForm
from .curvature import sl_value
from .errors import DomainError, InvalidInputError
from .hypersurface import (
    DEFAULT_ORDER,
    DEFAULT_STEP,
    ImmersionPatch,
    _first_derivatives,
    _second_derivatives,
    fundamental_forms,
    normal_field,
)
from .symmat import SymMatrix

__all__ = [
    "DeformationField",
    "LinearizedSample",
    "ScanResult",
    "deform_patch",
    "linearized_L",
    "fd_variation",
    "fd_shape_derivative",
    "j_value",
    "j_positivity_scan",
    "low_frequency_mode",
]

# fd_variation differentiates in t, so the chart step must keep roundoff far
# below t^2; a coarser chart step with the sixth-order stencil does that
VARIATION_STEP = 1e-2


@dataclass(frozen=True)
class DeformationField:
    patch: ImmersionPatch
    f: Callable[[np.ndarray], float]
    name: str = "f"

    def __call__(self, u) -> float:
        return float(self.f(np.asarray(u, dtype=float)))

    def scaled(self, s: float) -> "DeformationField":
        return DeformationField(self.patch, lambda u: s * self.f(u), f"{s}*{self.name}")

    def __add__(self, other: "DeformationField") -> "DeformationField":
        return DeformationField(self.patch, lambda u: self.f(u) + other.f(u), f"{self.name}+{other.name}")


def low_frequency_mode(patch: ImmersionPatch, amplitude: float = 1.0) -> DeformationField:
    """A smooth, non-constant test function: ``1 + cos`` and ``sin`` of the chart coordinates."""
    span = patch.hi - patch.lo

    def f(u):
        x = (u - patch.center) / span
        return amplitude * (0.6 + 0.3 * math.cos(2.0 * x[0]) + 0.4 * math.sin(1.5 * x[-1] + 0.3))

    return DeformationField(patch, f, "mode")


@dataclass(frozen=True)
class LinearizedSample:
    L_value: float
    W_matrix: SymMatrix
    J_value: float
    dA: np.ndarray = field(repr=False)          # predicted dA/dt as a mixed tensor in chart coordinates
    hess: np.ndarray = field(repr=False)        # covariant Hessian of f, chart coordinates
    sl: float = float("nan")


def deform_patch(fld: DeformationField, t: float) -> ImmersionPatch:
    """Pushoff of the patch along ``t f N`` by the exponential map of the ambient space form."""
    patch = fld.patch
    model = patch.model
    if not isinstance(model, SpaceForm):
        raise DomainError("normal deformations need a space-form ambient")
    if t == 0.0:
        return patch

    def nvec(u):
        if patch.normal is not None:
            return np.asarray(patch.normal(u), dtype=float) * patch.orientation
        return normal_field(patch, u)

    def f(u):
        p = patch(u)
        return model.exp_map(p, t * fld(u) * nvec(u))

    def outward(u):
        p = patch(u)
        n0 = nvec(u)
        q = model.exp_map(p, t * fld(u) * n0)
        return model.parallel_transport(p, q, n0)

    return ImmersionPatch(model, patch.lo, patch.hi, f, patch.orientation, outward, None,
                          f"{patch.name}+{t}*{fld.name}N")


def _curvature_endomorphism(model, p, nvec, tangents, ginv):
    """``W`` as a mixed tensor in chart coordinates, ``W(d_k) = R(N, d_k) N``."""
    n = len(tangents)
    wlow = np.array([[float(model.inner(p, model.riemann(p, nvec, tangents[k], nvec), tangents[l]))
                      for k in range(n)] for l in range(n)])
    return ginv @ wlow, wlow


def linearized_L(fld: DeformationField, u, rho: float, theta: float,
                 h: float = DEFAULT_STEP, order: int = DEFAULT_ORDER) -> LinearizedSample:
    """The linearized operator applied to ``f`` at ``u``.

    ``L = sqrt(det(I + rho^2 A^2)) * rho * tr((I + rho^2 A^2)^{-1}(f W - Hess f - f A^2))``;
    ``J = rho tr((I + rho^2 A^2)^{-1} (W - A^2))``. ``theta`` is accepted for
    symmetry with :func:`fd_variation`; the formula assumes ``SL_rho = theta``.
    """
    if not rho > 0.0:
        raise DomainError(f"rho must be positive, got {rho}")
    patch = fld.patch
    model = patch.model
    u = np.asarray(u, dtype=float)
    fd = fundamental_forms(patch, u, h, order)
    n = patch.dim
    g = fd.first_form
    ginv = np.linalg.inv(g)
    s_mixed = fd.shape_mixed
    f0 = fld(u)
    df = _first_derivatives(fld, u, h, order)
    d2f = _second_derivatives(fld, u, h, order, f0=f0)
    hess = d2f - np.einsum("mkl,m->kl", fd.christoffel, df)
    w_mixed, w_low = _curvature_endomorphism(model, fd.point, fd.normal, fd.tangents, ginv)
    dA = f0 * w_mixed - ginv @ hess - f0 * s_mixed @ s_mixed
    s2 = s_mixed @ s_mixed
    m = np.linalg.inv(np.eye(n) + rho ** 2 * s2)
    sqdet = math.sqrt(float(np.linalg.det(np.eye(n) + rho ** 2 * s2)))
    L = sqdet * rho * float(np.trace(m @ dA))
    J = rho * float(np.trace(m @ (w_mixed - s2)))
    chol = np.linalg.cholesky(g)
    linv = np.linalg.inv(chol)
    w_orth = SymMatrix(linv @ w_low @ linv.T)
    return LinearizedSample(L, w_orth, J, dA, hess, sl_value(fd.shape, rho))


def _im_rotated_det(patch, u, rho, theta, h, order):
    fd = fundamental_forms(patch, u, h, order)
    a = fd.shape.entries
    d = complex(np.linalg.det(np.eye(a.shape[0]) + 1j * rho * a))
    return (complex(math.cos(theta), -math.sin(theta)) * d).imag


def fd_variation(fld: DeformationField, u, rho: float, theta: float, t_step: float = 1e-3,
                 h: float = VARIATION_STEP, order: int = DEFAULT_ORDER) -> float:
    """Central difference in ``t`` of ``Im(e^{-i theta} det(I + i rho A_{f,t}))``."""
    if not t_step > 0.0:
        raise InvalidInputError("t_step must be positive")
    plus = _im_rotated_det(deform_patch(fld, t_step), u, rho, theta, h, order)
    minus = _im_rotated_det(deform_patch(fld, -t_step), u, rho, theta, h, order)
    return (plus - minus) / (2.0 * t_step)


def fd_shape_derivative(fld: DeformationField, u, t_step: float = 1e-3,
                        h: float = VARIATION_STEP, order: int = DEFAULT_ORDER) -> np.ndarray:
    """Central difference of the mixed Weingarten tensor ``g^-1 II`` along the deformation."""
    plus = fundamental_forms(deform_patch(fld, t_step), u, h, order).shape_mixed
    minus = fundamental_forms(deform_patch(fld, -t_step), u, h, order).shape_mixed
    return (plus - minus) / (2.0 * t_step)


# ------------------------------------------------------------- J positivity
def j_value(eigenvalues, rho: float, kappa: float) -> np.ndarray:
    """``J = rho sum (kappa - lambda^2)/(1 + rho^2 lambda^2)`` for ``W = kappa I``; rows are spectra."""
    lam = np.atleast_2d(np.asarray(eigenvalues, dtype=float))
    return rho * np.sum((kappa - lam ** 2) / (1.0 + (rho * lam) ** 2), axis=1)


@dataclass(frozen=True)
class ScanResult:
    min_J: float
    argmin: np.ndarray
    samples: int
    theta: float
    bound: float

    @property
    def within_hypotheses(self) -> bool:
        return self.theta <= self.bound + 1e-15


def j_positivity_scan(kappa: float, rho: float, theta: float, n: int, samples: int = 10_000,
                      rng=None, log_range: tuple = (0.1, 10.0)) -> ScanResult:
    """Minimum of ``J`` over random positive spectra rescaled so that ``SL_rho = theta``.

    Only spectra matter since ``W = kappa I`` commutes with every ``A``.
    """
    if not (kappa > 0.0 and rho > 0.0):
        raise DomainError("kappa and rho must be positive")
    if not 0.0 < theta < n * math.pi / 2:
        raise DomainError(f"theta outside (0, {n} pi/2)")
    rng = np.random.default_rng(rng)
    lo, hi = np.log(log_range[0]), np.log(log_range[1])
    lam = np.sort(np.exp(rng.uniform(lo, hi, size=(samples, n))), axis=1)
    r = kernels.invert_angle_batch(lam, np.full(samples, theta))
    lam = lam * (r / rho)[:, None]
    J = j_value(lam, rho, kappa)
    i = int(np.argmin(J))
    return ScanResult(float(J[i]), lam[i], samples, theta, n * math.atan(math.sqrt(kappa) * rho))


from .continuation import ContinuationResult, newton_continuation  # noqa: E402

__all__ += ["ContinuationResult", "newton_continuation"]

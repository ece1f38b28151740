"""Gauss lifts into the rho-sphere bundle and their structure forms.

A tangent vector to the sphere bundle at ``(p, v)`` is split into a
horizontal part ``X`` and a vertical part ``Y``, both tangent to the base at
``p``. On the contact plane (``X, Y`` orthogonal to ``v``) an orthonormal
frame ``E_1..E_n`` of ``v``-perp identifies a vector with a pair of
coordinate vectors ``(x, y)`` in ``R^n x R^n``. The structure forms are then

* ``omega = <x1, y2> - <y1, x2>``  (symplectic),
* ``m = (<x1, y2> + <y1, x2>) / 2`` (Minkowski pairing),
* ``Omega_theta = exp(-i theta) det(x + i y)`` (complex volume),
* ``g = <x1, x2> + <y1, y2>`` (lifted metric).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ambient import ortho_frame
from .errors import DomainError, InvalidInputError
from .hypersurface import (
    DEFAULT_ORDER,
    DEFAULT_STEP,
    ImmersionPatch,
    _first_derivatives,
    fundamental_forms,
    normal_field,
)
from .symmat import SymMatrix, as_sym, eigen_sym

__all__ = [
    "SphereBundlePoint",
    "SplitVector",
    "LiftFrame",
    "LegendrianReport",
    "LiftedMetricResult",
    "gauss_lift",
    "legendrian_report",
    "lifted_metric_check",
    "f_tau",
    "verticality_order",
    "horizontal_singular_values",
    "normal_bundle_frame",
]


@dataclass(frozen=True)
class SphereBundlePoint:
    model: object
    base: np.ndarray
    vector: np.ndarray
    rho: float

    def __post_init__(self):
        if not self.rho > 0.0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        norm = self.model.norm(self.base, self.vector)
        if abs(norm - self.rho) > 1e-10 * max(1.0, self.rho):
            raise InvalidInputError(f"|v| = {norm} differs from rho = {self.rho}")


@dataclass(frozen=True)
class SplitVector:
    horizontal: np.ndarray
    vertical: np.ndarray


@dataclass(frozen=True)
class LiftFrame:
    point: SphereBundlePoint
    tangent_basis: tuple
    frame: np.ndarray = field(repr=False)      # rows E_1..E_n of v-perp
    x: np.ndarray = field(repr=False)          # horizontal frame components, column k = basis vector k
    y: np.ndarray = field(repr=False)          # vertical frame components
    forms: dict = field(repr=False)
    lifted_metric: np.ndarray = field(repr=False)
    dual_metric: np.ndarray = field(repr=False)
    f_tau: float = 1.0
    shape: SymMatrix | None = None

    @property
    def dim(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class LegendrianReport:
    contact: float
    symplectic: float
    positivity_min: float
    special_angle: float
    tol: float

    @property
    def is_positive(self) -> bool:
        return self.positivity_min >= -self.tol

    @property
    def ok(self) -> bool:
        return (self.contact <= self.tol and self.symplectic <= self.tol
                and self.special_angle <= self.tol and self.is_positive)

    def as_dict(self) -> dict:
        return {
            "contact": self.contact,
            "symplectic": self.symplectic,
            "positivity_min": self.positivity_min,
            "special_angle": self.special_angle,
            "tol": self.tol,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class LiftedMetricResult:
    residual: float
    gram: np.ndarray
    expected: np.ndarray
    dual: np.ndarray


def f_tau(a, rho: float, tau: float) -> float:
    """Verticality functional ``det(I + rho^2 A^2)^(-tau)``, ``0 < tau <= 1/(2n)``."""
    a = as_sym(a)
    n = a.dim
    if not (0.0 < tau <= 1.0 / (2 * n) + 1e-15):
        raise DomainError(f"tau={tau} outside (0, 1/(2n)] with n={n}")
    if not rho > 0.0:
        raise DomainError(f"rho must be positive, got {rho}")
    w = eigen_sym(a).eigenvalues
    logdet = float(np.sum(np.log1p((rho * w) ** 2)))
    return math.exp(-tau * logdet)


def _assemble(model, p, v, rho, xs, ys, tau, rotation=None, shape=None) -> LiftFrame:
    point = SphereBundlePoint(model, p, v, rho)
    n = len(xs)
    frame = ortho_frame(model, p, v)[:n]
    if rotation is not None:
        rotation = np.asarray(rotation, dtype=float)
        if np.max(np.abs(rotation @ rotation.T - np.eye(n))) > 1e-10:
            raise InvalidInputError("frame rotation must be orthogonal")
        frame = rotation @ frame
    gm = model.metric_matrix(p)
    x = frame @ gm @ np.array(xs).T
    y = frame @ gm @ np.array(ys).T
    omega = x.T @ y - y.T @ x
    m = 0.5 * (x.T @ y + y.T @ x)
    vol = complex(np.linalg.det(x + 1j * y))
    gram = np.array([[float(model.inner(p, xs[j], xs[k]) + model.inner(p, ys[j], ys[k]))
                      for k in range(n)] for j in range(n)])
    dual = np.linalg.inv(gram)
    if tau is None:
        tau = 1.0 / (2 * n)
    sv = _horizontal_sv(x, y)
    ft = float(np.prod(sv) ** (2.0 * tau))
    basis = tuple(SplitVector(np.asarray(a), np.asarray(b)) for a, b in zip(xs, ys))
    forms = {"omega": omega, "m": m, "Omega": vol, "g": x.T @ x + y.T @ y}
    return LiftFrame(point, basis, frame, x, y, forms, gram, dual, ft, shape)


def _vertical_parts(patch, u, rho, h, order, p, d):
    model = patch.model

    def nf(w):
        return normal_field(patch, w, h, order)

    dn = _first_derivatives(nf, u, h, order)
    nvec = nf(u)
    return [rho * model.project(p, dn[k] + model.gamma(p, d[k], nvec)) for k in range(len(d))], nvec


def gauss_lift(patch: ImmersionPatch, u, rho: float, tau: float | None = None,
               rotation=None, h: float = DEFAULT_STEP, order: int = DEFAULT_ORDER) -> LiftFrame:
    """Gauss lift ``u -> (i(u), rho N(u))`` with basis ``{d_k i, rho nabla_k N}``.

    The vertical parts come from covariant finite differences of the
    numerical normal field, independently of the second fundamental form.
    ``rotation`` re-seeds the frame of ``v``-perp (an orthogonal matrix).
    """
    if not rho > 0.0:
        raise DomainError(f"rho must be positive, got {rho}")
    fd = fundamental_forms(patch, u, h, order)
    u = np.asarray(u, dtype=float)
    ys, nvec = _vertical_parts(patch, u, rho, h, order, fd.point, fd.tangents)
    return _assemble(patch.model, fd.point, rho * fd.normal, rho, list(fd.tangents), ys, tau,
                     rotation, fd.shape)


def legendrian_report(frame: LiftFrame, theta: float, tol: float = 1e-8) -> LegendrianReport:
    """Residuals of the special Legendrian conditions on a lift frame."""
    model, p, v = frame.point.model, frame.point.base, frame.point.vector
    contact = 0.0
    for sv in frame.tangent_basis:
        contact = max(contact, abs(float(model.inner(p, v, sv.horizontal))),
                      abs(float(model.inner(p, v, sv.vertical))))
    symp = float(np.max(np.abs(frame.forms["omega"])))
    # positivity measured in a basis orthonormal for the lifted metric
    chol = np.linalg.cholesky(frame.lifted_metric)
    linv = np.linalg.inv(chol)
    m = linv @ frame.forms["m"] @ linv.T
    pos = float(np.linalg.eigvalsh(0.5 * (m + m.T))[0])
    vol = frame.forms["Omega"]
    rot = complex(math.cos(theta), -math.sin(theta)) * vol
    special = abs(rot.imag) / abs(vol) if abs(vol) > 0.0 else float("nan")
    return LegendrianReport(contact, symp, pos, special, tol)


def lifted_metric_check(patch: ImmersionPatch, u, rho: float, h: float = DEFAULT_STEP,
                        order: int = DEFAULT_ORDER) -> LiftedMetricResult:
    """Compare the Gram matrix of the lift with ``g((I + rho^2 A^2) ., .)``.

    In chart coordinates the expected matrix is ``g + rho^2 II g^-1 II``,
    built from the second fundamental form, while the Gram matrix uses the
    finite-difference derivative of the normal.
    """
    fd = fundamental_forms(patch, u, h, order)
    lift = gauss_lift(patch, u, rho, h=h, order=order)
    g, ii = fd.first_form, fd.second_form
    expected = g + rho ** 2 * ii @ np.linalg.solve(g, ii)
    res = float(np.max(np.abs(lift.lifted_metric - expected)))
    return LiftedMetricResult(res, lift.lifted_metric, expected, lift.dual_metric)


def _horizontal_sv(x, y):
    q, _ = np.linalg.qr(np.vstack([x, y]))
    return np.linalg.svd(q[: x.shape[0]], compute_uv=False)


def horizontal_singular_values(frame: LiftFrame) -> np.ndarray:
    """Singular values of the horizontal projection of the (orthonormalized) tangent plane."""
    return _horizontal_sv(frame.x, frame.y)


def verticality_order(frame: LiftFrame, tol: float = 1e-6) -> int:
    """Numerical dimension of the intersection of the lifted tangent plane with the vertical."""
    if not tol > 0.0:
        raise InvalidInputError("tol must be positive")
    return int(np.sum(horizontal_singular_values(frame) < tol))


def normal_bundle_frame(model, rho: float, t: float = 0.0, fiber_point=None,
                        tau: float | None = None) -> LiftFrame:
    """Exact tangent plane of the normal rho-sphere bundle of a geodesic.

    The geodesic is ``t -> (cosh kt, sinh kt, 0, ...)/k``; ``fiber_point``
    is a unit vector in the span of the remaining coordinates (defaults to
    the last axis). The plane contains the geodesic direction (horizontal)
    and ``n-1`` purely vertical fiber directions.
    """
    if not model.is_hyperbolic or model.point_dim != model.dim + 1:
        raise DomainError("normal bundle frames are built in the hyperboloid model")
    k = model.scale
    d = model.point_dim
    p = np.zeros(d)
    p[0], p[1] = math.cosh(k * t) / k, math.sinh(k * t) / k
    tang = np.zeros(d)
    tang[0], tang[1] = math.sinh(k * t), math.cosh(k * t)
    if fiber_point is None:
        omega = np.zeros(d)
        omega[-1] = 1.0
    else:
        omega = np.concatenate([[0.0, 0.0], np.asarray(fiber_point, dtype=float)])
        omega /= np.linalg.norm(omega)
    fib = [e for e in np.eye(d)[2:]]
    ys_fib = []
    for e in fib:
        w = e - float(e @ omega) * omega
        for z in ys_fib:
            w = w - float(w @ z) * z
        nw = float(np.linalg.norm(w))
        if nw > 1e-8:
            ys_fib.append(w / nw)
    zero = np.zeros(d)
    xs = [tang] + [zero] * len(ys_fib)
    ys = [zero] + [rho * w for w in ys_fib]
    return _assemble(model, p, rho * omega, rho, xs, ys, tau)

"""Ambient Riemannian models.

Every model exposes the same small interface used by the hypersurface code:

``point_dim``
    length of coordinate arrays for points and tangent vectors.
``inner(p, u, v)``
    metric pairing of tangent vectors at ``p``.
``gamma(p, x, y)``
    bilinear correction such that ``nabla_x Y = dY(x) + gamma(p, x, Y)`` for a
    tangent field ``Y`` differentiated in model coordinates.
``project(p, w)`` / ``normal_constraints(p)``
    tangent projection and the coordinate vectors a tangent vector must be
    metric-orthogonal to (the position vector on the hyperboloid).
``riemann(p, x, y, z)``
    curvature with ``<R(x, y) y, x>`` the sectional curvature of an
    orthonormal pair.

Space forms of curvature ``c < 0`` live on the hyperboloid
``<x, x>_L = 1/c`` in Minkowski space; Euclidean space uses plain
coordinates. Conformal perturbations ``(1 + eps * bump) g`` are realized in a
coordinate chart (identity for Euclidean, Poincare ball for hyperbolic) with
finite-difference Christoffel symbols.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidInputError

__all__ = [
    "SpaceForm",
    "Bump",
    "MetricPerturbation",
    "riemann",
    "exp_map",
    "ortho_frame",
    "model_from_descriptor",
    "lorentz",
]

_TANGENT_TOL = 1e-8


def lorentz(u, v):
    """Minkowski pairing ``-u0 v0 + sum_i ui vi`` (batched over leading axes)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.sum(u[..., 1:] * v[..., 1:], axis=-1) - u[..., 0] * v[..., 0]


def _sinhc(x):
    if abs(x) < 1e-4:
        x2 = x * x
        return 1.0 + x2 / 6.0 + x2 * x2 / 120.0
    return math.sinh(x) / x


@dataclass(frozen=True)
class SpaceForm:
    """Complete simply connected space of constant curvature ``c <= 0``.

    ``dim`` is the ambient dimension ``n + 1``.
    """

    dim: int
    curvature: float = 0.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise InvalidInputError(f"ambient dimension must be an integer >= 2, got {self.dim}")
        if not (math.isfinite(self.curvature) and self.curvature <= 0.0):
            raise DomainError(f"curvature must be finite and <= 0, got {self.curvature}")

    @property
    def kind(self) -> str:
        return "euclidean" if self.curvature == 0.0 else "hyperbolic"

    @property
    def is_hyperbolic(self) -> bool:
        return self.curvature < 0.0

    @property
    def scale(self) -> float:
        """``k = sqrt(-c)`` for hyperbolic models."""
        return math.sqrt(-self.curvature)

    @property
    def point_dim(self) -> int:
        return self.dim + 1 if self.is_hyperbolic else self.dim

    @property
    def hypersurface_dim(self) -> int:
        return self.dim - 1

    def origin(self) -> np.ndarray:
        p = np.zeros(self.point_dim)
        if self.is_hyperbolic:
            p[0] = 1.0 / self.scale
        return p

    def descriptor(self) -> dict:
        return {"type": self.kind, "dim": self.dim, "curvature": self.curvature}

    # metric -------------------------------------------------------------
    def inner(self, p, u, v):
        if self.is_hyperbolic:
            return lorentz(u, v)
        return np.sum(np.asarray(u, dtype=float) * np.asarray(v, dtype=float), axis=-1)

    def norm(self, p, u) -> float:
        return math.sqrt(max(float(self.inner(p, u, u)), 0.0))

    def metric_matrix(self, p) -> np.ndarray:
        g = np.eye(self.point_dim)
        if self.is_hyperbolic:
            g[0, 0] = -1.0
        return g

    def gamma(self, p, x, y) -> np.ndarray:
        if self.is_hyperbolic:
            return self.curvature * float(lorentz(x, y)) * np.asarray(p, dtype=float)
        return np.zeros(self.point_dim)

    def project(self, p, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if self.is_hyperbolic:
            p = np.asarray(p, dtype=float)
            return w - self.curvature * float(lorentz(w, p)) * p
        return w.copy()

    def normal_constraints(self, p) -> list:
        return [np.asarray(p, dtype=float)] if self.is_hyperbolic else []

    def on_model_residual(self, p) -> float:
        if self.is_hyperbolic:
            return abs(float(lorentz(p, p)) - 1.0 / self.curvature)
        return 0.0

    def tangent_residual(self, p, u) -> float:
        if self.is_hyperbolic:
            scale = max(1.0, float(np.max(np.abs(u))))
            return abs(self.curvature * float(lorentz(u, p))) / scale
        return 0.0

    def _require_tangent(self, p, *vectors):
        for u in vectors:
            if self.tangent_residual(p, u) > _TANGENT_TOL:
                raise DomainError("vector is not tangent to the model at p")

    # curvature ----------------------------------------------------------
    def riemann(self, p, x, y, z) -> np.ndarray:
        self._require_tangent(p, x, y, z)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        c = self.curvature
        return c * (float(self.inner(p, y, z)) * x - float(self.inner(p, x, z)) * y)

    def sectional(self, p, x, y) -> float:
        r = self.riemann(p, x, y, y)
        area = float(self.inner(p, x, x) * self.inner(p, y, y) - self.inner(p, x, y) ** 2)
        return float(self.inner(p, r, x)) / area

    # geodesics ----------------------------------------------------------
    def exp_map(self, p, v) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        if not self.is_hyperbolic:
            return p + v
        k = self.scale
        t = k * self.norm(p, v)
        return math.cosh(t) * p + _sinhc(t) * v

    def distance(self, p, q) -> float:
        if not self.is_hyperbolic:
            return float(np.linalg.norm(np.asarray(q, dtype=float) - np.asarray(p, dtype=float)))
        k = self.scale
        arg = self.curvature * float(lorentz(p, q))
        return math.acosh(max(arg, 1.0)) / k

    def parallel_transport(self, p, q, v) -> np.ndarray:
        """Transport ``v`` from ``p`` to ``q`` along the joining geodesic."""
        v = np.asarray(v, dtype=float)
        if not self.is_hyperbolic:
            return v.copy()
        k = self.scale
        ph = k * np.asarray(p, dtype=float)
        qh = k * np.asarray(q, dtype=float)
        return v + float(lorentz(qh, v)) / (1.0 - float(lorentz(ph, qh))) * (ph + qh)


@dataclass(frozen=True)
class Bump:
    """Smooth scalar bump on model coordinates.

    ``gaussian``: ``exp(-|x - center|^2 / width^2)`` on the spatial
    coordinates (hyperboloid: coordinates 1..; Euclidean: all).
    ``slab``: ``exp(-(x[axis] - center)^2 / width^2)``, a function of one
    model coordinate.
    """

    kind: str = "gaussian"
    center: tuple = ()
    width: float = 1.0
    axis: int = 1

    # sup-norm bounds of the bump and its first two derivatives
    @property
    def bounds(self) -> tuple[float, float, float]:
        w = self.width
        return 1.0, math.sqrt(2.0 / math.e) / w, 2.0 / (w * w)

    def __post_init__(self):
        if self.kind not in ("gaussian", "slab"):
            raise InvalidInputError(f"unknown bump kind {self.kind!r}")
        if not self.width > 0.0:
            raise InvalidInputError("bump width must be positive")

    def _offset(self, x, hyperbolic):
        x = np.asarray(x, dtype=float)
        if self.kind == "slab":
            c = float(self.center[0]) if len(self.center) else 0.0
            return x[..., self.axis] - c
        spatial = x[..., 1:] if hyperbolic else x
        c = np.asarray(self.center, dtype=float) if len(self.center) else np.zeros(spatial.shape[-1])
        return spatial - c

    def value(self, x, hyperbolic=False):
        d = self._offset(x, hyperbolic)
        if self.kind == "slab":
            return np.exp(-(d * d) / self.width ** 2)
        return np.exp(-np.sum(d * d, axis=-1) / self.width ** 2)

    def gradient(self, x, hyperbolic=False) -> np.ndarray:
        """Coordinate gradient at a single point in the model's coordinates."""
        x = np.asarray(x, dtype=float)
        val = float(self.value(x, hyperbolic))
        d = self._offset(x, hyperbolic)
        g = np.zeros_like(x)
        if self.kind == "slab":
            g[self.axis] = -2.0 * float(d) / self.width ** 2 * val
        elif hyperbolic:
            g[1:] = -2.0 * d / self.width ** 2 * val
        else:
            g[:] = -2.0 * d / self.width ** 2 * val
        return g

    def descriptor(self) -> dict:
        d = {"bump": self.kind, "center": list(self.center), "width": self.width}
        if self.kind == "slab":
            d["axis"] = self.axis
        return d


@dataclass(frozen=True)
class MetricPerturbation:
    """Conformal perturbation ``(1 + epsilon * bump) g`` of a space form.

    Points are chart coordinates in ``R^(n+1)``: the identity chart for a
    Euclidean base, the Poincare ball of radius ``1/sqrt(-c)`` for a
    hyperbolic base. ``fd_step`` is the step of the finite differences
    producing Christoffel symbols and curvature.
    """

    base: SpaceForm
    epsilon: float = 0.0
    bump: Bump = field(default_factory=Bump)
    fd_step: float = 1e-3

    def __post_init__(self):
        if not math.isfinite(self.epsilon):
            raise InvalidInputError("epsilon must be finite")

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def point_dim(self) -> int:
        return self.base.dim

    @property
    def hypersurface_dim(self) -> int:
        return self.base.dim - 1

    @property
    def curvature(self) -> float:
        return self.base.curvature

    @property
    def is_hyperbolic(self) -> bool:
        return self.base.is_hyperbolic

    def descriptor(self) -> dict:
        d = self.base.descriptor()
        d["perturbation"] = {"epsilon": self.epsilon, **self.bump.descriptor()}
        return d

    # chart <-> base model -------------------------------------------------
    def to_model(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if not self.is_hyperbolic:
            return q.copy()
        k = self.base.scale
        s = k * k * float(q @ q)
        return np.concatenate([[(1.0 + s) / (k * (1.0 - s))], 2.0 * q / (1.0 - s)])

    def to_chart(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if not self.is_hyperbolic:
            return x.copy()
        return x[1:] / (1.0 + self.base.scale * x[0])

    def base_factor(self, q) -> float:
        if not self.is_hyperbolic:
            return 1.0
        k = self.base.scale
        s = k * k * float(np.dot(q, q))
        if s >= 1.0:
            raise DomainError("point outside the Poincare ball")
        return 4.0 / (1.0 - s) ** 2

    def bump_factor(self, q) -> float:
        return 1.0 + self.epsilon * float(self.bump.value(self.to_model(q), self.is_hyperbolic))

    def factor(self, q) -> float:
        return self.base_factor(q) * self.bump_factor(q)

    # metric -------------------------------------------------------------
    def inner(self, p, u, v):
        return self.factor(p) * np.sum(np.asarray(u, dtype=float) * np.asarray(v, dtype=float), axis=-1)

    def norm(self, p, u) -> float:
        return math.sqrt(max(float(self.inner(p, u, u)), 0.0))

    def metric_matrix(self, p) -> np.ndarray:
        return self.factor(p) * np.eye(self.point_dim)

    def project(self, p, w) -> np.ndarray:
        return np.asarray(w, dtype=float).copy()

    def normal_constraints(self, p) -> list:
        return []

    def on_model_residual(self, p) -> float:
        return 0.0

    def tangent_residual(self, p, u) -> float:
        return 0.0

    def _log_factor_grad(self, q) -> np.ndarray:
        """Fourth-order central differences of ``log(factor)``."""
        q = np.asarray(q, dtype=float)
        h = self.fd_step
        grad = np.empty(q.shape[0])
        for i in range(q.shape[0]):
            e = np.zeros_like(q)
            e[i] = h
            f = [math.log(self.factor(q + s * e)) for s in (-2, -1, 1, 2)]
            grad[i] = (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h)
        return grad

    def christoffel(self, q) -> np.ndarray:
        """``Gamma[k, i, j]`` in chart coordinates."""
        s = 0.5 * self._log_factor_grad(q)
        d = q.shape[0] if hasattr(q, "shape") else len(q)
        eye = np.eye(d)
        return (
            np.einsum("ki,j->kij", eye, s)
            + np.einsum("kj,i->kij", eye, s)
            - np.einsum("ij,k->kij", eye, s)
        )

    def gamma(self, p, x, y) -> np.ndarray:
        return np.einsum("kij,i,j->k", self.christoffel(np.asarray(p, dtype=float)), x, y)

    def riemann_tensor(self, q) -> np.ndarray:
        """``R[l, i, j, k]`` with ``R(d_i, d_j) d_k = R[l, i, j, k] d_l``."""
        q = np.asarray(q, dtype=float)
        h = self.fd_step
        d = q.shape[0]
        gam = self.christoffel(q)
        dgam = np.empty((d,) + gam.shape)  # dgam[m, k, i, j] = d_m Gamma^k_ij
        for m in range(d):
            e = np.zeros(d)
            e[m] = h
            g = [self.christoffel(q + s * e) for s in (-2, -1, 1, 2)]
            dgam[m] = (g[0] - 8.0 * g[1] + 8.0 * g[2] - g[3]) / (12.0 * h)
        r = (
            np.einsum("iljk->lijk", dgam)
            - np.einsum("jlik->lijk", dgam)
            + np.einsum("lim,mjk->lijk", gam, gam)
            - np.einsum("ljm,mik->lijk", gam, gam)
        )
        return r

    def riemann(self, p, x, y, z) -> np.ndarray:
        return np.einsum("lijk,i,j,k->l", self.riemann_tensor(p), x, y, z)

    def base_riemann(self, p, x, y, z) -> np.ndarray:
        """Closed-form curvature of the unperturbed base metric in this chart."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        g0 = self.base_factor(p)
        c = self.curvature
        return c * g0 * (float(np.dot(y, z)) * x - float(np.dot(x, z)) * y)

    def sectional(self, p, x, y) -> float:
        r = self.riemann(p, x, y, y)
        area = float(self.inner(p, x, x) * self.inner(p, y, y) - self.inner(p, x, y) ** 2)
        return float(self.inner(p, r, x)) / area

    def bump_bounds_ok(self, samples) -> bool:
        """Check the declared sup bounds of the bump on sampled model points."""
        v0, v1, _ = self.bump.bounds
        for x in samples:
            if abs(float(self.bump.value(x, self.is_hyperbolic))) > v0 + 1e-12:
                return False
            if float(np.linalg.norm(self.bump.gradient(x, self.is_hyperbolic))) > v1 + 1e-12:
                return False
        return True


def riemann(model, p, x, y, z) -> np.ndarray:
    """Curvature endomorphism ``R(x, y) z`` at ``p``."""
    return model.riemann(p, x, y, z)


def exp_map(model: SpaceForm, p, v) -> np.ndarray:
    """Geodesic exponential map of a space form."""
    if not isinstance(model, SpaceForm):
        raise DomainError("closed-form exponential map needs a SpaceForm")
    model._require_tangent(p, v)
    return model.exp_map(p, v)


def ortho_frame(model, p, seed) -> np.ndarray:
    """Orthonormal tangent basis at ``p`` whose last vector is ``seed`` normalized.

    Rows ``E_1 .. E_n, seed/|seed|``; orientation fixed so that the
    determinant of ``[p (hyperboloid only), E_1, ..., E_n, seed]`` is positive.
    """
    p = np.asarray(p, dtype=float)
    seed = np.asarray(seed, dtype=float)
    if model.tangent_residual(p, seed) > 1e-6:
        raise DomainError("seed is not tangent to the model at p")
    seed = model.project(p, seed)
    s_norm = model.norm(p, seed)
    if not s_norm > 1e-14:
        raise DomainError("seed vector is zero")
    basis = [seed / s_norm]
    d = model.point_dim
    for i in np.argsort(-np.abs(seed)):
        if len(basis) == model.dim:
            break
        w = model.project(p, np.eye(d)[i])
        for _ in range(2):
            for b in basis:
                w = w - float(model.inner(p, w, b)) * b
        nw = model.norm(p, w)
        if nw > 1e-8:
            basis.append(w / nw)
    if len(basis) < model.dim:
        raise DomainError("could not complete an orthonormal frame")
    frame = np.array(basis[1:] + basis[:1])
    rows = ([p] if model.point_dim > model.dim else []) + list(frame)
    if np.linalg.det(np.array(rows)) < 0.0 and frame.shape[0] > 1:
        frame[0] = -frame[0]
    return frame


def model_from_descriptor(desc: dict):
    """Build a model from its JSON descriptor."""
    try:
        kind = desc["type"]
        dim = int(desc["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad model descriptor: {desc!r}") from exc
    if kind == "euclidean":
        base = SpaceForm(dim, 0.0)
    elif kind == "hyperbolic":
        base = SpaceForm(dim, float(desc.get("curvature", -1.0)))
        if not base.is_hyperbolic:
            raise DomainError("hyperbolic model needs negative curvature")
    else:
        raise InvalidInputError(f"unknown model type {kind!r}")
    pert = desc.get("perturbation")
    if not pert:
        return base
    bump = Bump(
        kind=pert.get("bump", "gaussian"),
        center=tuple(float(c) for c in np.atleast_1d(pert.get("center", []))),
        width=float(pert.get("width", 1.0)),
        axis=int(pert.get("axis", 1)),
    )
    return MetricPerturbation(base, float(pert.get("epsilon", 0.0)), bump)

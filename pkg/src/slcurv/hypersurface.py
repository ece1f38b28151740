"""Parametrized hypersurface patches and their numerically computed fundamental forms."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ambient import MetricPerturbation, SpaceForm, model_from_descriptor
from .curvature import sl_value
from .errors import DomainError, ImmersionDegeneracyError, InvalidInputError
from .symmat import SymMatrix

__all__ = [
    "ImmersionPatch",
    "FundamentalData",
    "FamilySpec",
    "fundamental_forms",
    "sl_of_patch",
    "make_family",
    "graph_patch",
    "patch_from_descriptor",
    "FAMILY_KINDS",
    "DEFAULT_STEP",
    "DEFAULT_ORDER",
]

DEFAULT_STEP = 2e-3
DEFAULT_ORDER = 6
FAMILY_KINDS = ("geodesic-sphere", "equidistant", "tube-around-geodesic", "euclidean-sphere", "revolution-profile")

# first-derivative stencils: offsets and weights (divide by h)
_D1 = {
    2: ((-1, 1), (-0.5, 0.5)),
    4: ((-2, -1, 1, 2), (1 / 12, -8 / 12, 8 / 12, -1 / 12)),
    6: ((-3, -2, -1, 1, 2, 3), (-1 / 60, 3 / 20, -3 / 4, 3 / 4, -3 / 20, 1 / 60)),
}
# second-derivative stencils (divide by h**2)
_D2 = {
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    4: ((-2, -1, 0, 1, 2), (-1 / 12, 16 / 12, -30 / 12, 16 / 12, -1 / 12)),
    6: ((-3, -2, -1, 0, 1, 2, 3), (1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90)),
}


@dataclass(frozen=True)
class ImmersionPatch:
    """A chart map ``box in R^n -> model``.

    ``outward`` optionally returns, at a chart point, an ambient vector whose
    pairing with the normal fixes the normal's sign (before ``orientation``).
    ``normal`` optionally gives the exact unit normal; it is only used where a
    smooth normal field is needed to build new maps (normal deformations).
    """

    model: object
    lo: np.ndarray
    hi: np.ndarray
    map: Callable[[np.ndarray], np.ndarray]
    orientation: int = 1
    outward: Callable | None = None
    normal: Callable | None = None
    name: str = "patch"

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape or np.any(hi <= lo):
            raise InvalidInputError("chart box must satisfy lo < hi componentwise")
        if self.orientation not in (1, -1):
            raise InvalidInputError("orientation must be +1 or -1")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def __call__(self, u) -> np.ndarray:
        return np.asarray(self.map(np.asarray(u, dtype=float)), dtype=float)

    def flipped(self) -> "ImmersionPatch":
        return ImmersionPatch(self.model, self.lo, self.hi, self.map, -self.orientation,
                              self.outward, self.normal, self.name + "(flipped)")

    def sample(self, rng, count: int, margin: float = 0.1) -> np.ndarray:
        span = self.hi - self.lo
        return self.lo + margin * span + (1 - 2 * margin) * span * rng.random((count, self.dim))


@dataclass(frozen=True)
class FundamentalData:
    point: np.ndarray
    tangents: np.ndarray          # rows d_k i
    first_form: np.ndarray        # g_kl
    second_form: np.ndarray       # II_kl
    normal: np.ndarray
    shape: SymMatrix              # A in the orthonormal frame `frame`
    shape_mixed: np.ndarray       # g^-1 II, the Weingarten map in chart coordinates
    frame: np.ndarray             # rows: orthonormal tangent frame E_i
    christoffel: np.ndarray       # induced Christoffels [m, k, l]
    covariant_hessian: np.ndarray = field(repr=False, default=None)  # nabla_k d_l i
    step: float = DEFAULT_STEP
    order: int = DEFAULT_ORDER

    @property
    def chol(self) -> np.ndarray:
        return np.linalg.cholesky(self.first_form)


def _stencil_eval(f, u, h, k, offsets):
    out = []
    for a in offsets:
        v = u.copy()
        v[k] += a * h
        out.append(f(v))
    return out


def _first_derivatives(f, u, h, order):
    offs, wts = _D1[order]
    rows = []
    for k in range(u.shape[0]):
        vals = _stencil_eval(f, u, h, k, offs)
        rows.append(sum(w * v for w, v in zip(wts, vals)) / h)
    return np.array(rows)


def _second_derivatives(f, u, h, order, f0=None):
    n = u.shape[0]
    offs1, w1 = _D1[order]
    offs2, w2 = _D2[order]
    f0 = f(u) if f0 is None else f0
    out = None
    for k in range(n):
        vals = []
        for a in offs2:
            if a == 0:
                vals.append(f0)
            else:
                v = u.copy()
                v[k] += a * h
                vals.append(f(v))
        dkk = sum(w * x for w, x in zip(w2, vals)) / (h * h)
        if out is None:
            out = np.empty((n, n) + np.shape(dkk))
        out[k, k] = dkk
    for k in range(n):
        for l in range(k + 1, n):
            acc = 0.0
            for a, wa in zip(offs1, w1):
                for b, wb in zip(offs1, w1):
                    v = u.copy()
                    v[k] += a * h
                    v[l] += b * h
                    acc = acc + wa * wb * f(v)
            out[k, l] = out[l, k] = acc / (h * h)
    return out


def unit_normal(model, p, tangents, orientation=1, outward=None):
    """Unit normal to the rows of ``tangents`` with sign fixed by ``outward``.

    Without ``outward`` the sign makes ``det[constraints, tangents, N]``
    positive. ``orientation`` multiplies the result.
    """
    gm = model.metric_matrix(p)
    cons = list(model.normal_constraints(p))
    rows = np.array([gm @ t for t in tangents] + [gm @ c for c in cons])
    _, _, vt = np.linalg.svd(rows)
    nvec = vt[-1]
    nvec = model.project(p, nvec)
    nn = model.norm(p, nvec)
    if not nn > 0.0:
        raise ImmersionDegeneracyError("could not find a unit normal")
    nvec = nvec / nn
    if outward is not None:
        sign = 1.0 if float(model.inner(p, nvec, outward)) >= 0.0 else -1.0
    else:
        det = np.linalg.det(np.array(cons + list(tangents) + [nvec]))
        sign = 1.0 if det >= 0.0 else -1.0
    return sign * orientation * nvec


def _check_interior(patch, u, margin):
    if np.any(u - patch.lo < margin) or np.any(patch.hi - u < margin):
        raise DomainError(f"chart point {u} closer than {margin:g} to the chart boundary")


def normal_field(patch, u, h=DEFAULT_STEP, order=DEFAULT_ORDER):
    """Numerical unit normal of ``patch`` at ``u`` (first derivatives only)."""
    u = np.asarray(u, dtype=float)
    model = patch.model
    p = patch(u)
    d = _first_derivatives(patch, u, h, order)
    d = np.array([model.project(p, t) for t in d])
    out = patch.outward(u) if patch.outward is not None else None
    return unit_normal(model, p, d, patch.orientation, out)


def fundamental_forms(patch: ImmersionPatch, u, h: float = DEFAULT_STEP,
                      order: int = DEFAULT_ORDER) -> FundamentalData:
    """First and second fundamental forms, normal and shape operator at ``u``.

    The second form is ``II_kl = -<N, nabla_{d_k} d_l i>`` with the ambient
    covariant second derivative of the chart map; the shape operator is
    ``II`` expressed in an orthonormal frame of the induced metric.
    """
    if order not in _D1:
        raise InvalidInputError("finite-difference order must be 2, 4 or 6")
    u = np.asarray(u, dtype=float)
    reach = max(_D1[order][0]) * h
    _check_interior(patch, u, max(2 * h, reach))
    model = patch.model
    p = patch(u)
    d = _first_derivatives(patch, u, h, order)
    d = np.array([model.project(p, t) for t in d])
    n = d.shape[0]
    g = np.array([[float(model.inner(p, a, b)) for b in d] for a in d])
    if not np.all(np.isfinite(g)):
        raise ImmersionDegeneracyError("non-finite induced metric")
    gev = np.linalg.eigvalsh(g)
    if gev[0] <= 1e-16 * max(1.0, gev[-1]):
        raise ImmersionDegeneracyError(f"differential lost rank (smallest singular value {math.sqrt(max(gev[0], 0)):.3g})")
    outward = patch.outward(u) if patch.outward is not None else None
    nvec = unit_normal(model, p, d, patch.orientation, outward)

    d2 = _second_derivatives(patch, u, h, order, f0=p)
    cov = np.empty_like(d2)
    for k in range(n):
        for l in range(n):
            cov[k, l] = d2[k, l] + model.gamma(p, d[k], d[l])
    ii = np.array([[-float(model.inner(p, nvec, cov[k, l])) for l in range(n)] for k in range(n)])
    ginv = np.linalg.inv(g)
    proj = np.array([[[float(model.inner(p, cov[k, l], d[j])) for j in range(n)] for l in range(n)] for k in range(n)])
    christ = np.einsum("mj,klj->mkl", ginv, proj)

    chol = np.linalg.cholesky(g)
    linv = np.linalg.inv(chol)
    a_orth = linv @ ii @ linv.T
    asym = float(np.max(np.abs(a_orth - a_orth.T)))
    if asym > 1e-6:
        warnings.warn(f"shape operator asymmetry {asym:.2e}; step too large or map not smooth",
                      RuntimeWarning, stacklevel=2)
    frame = linv @ d
    return FundamentalData(
        point=p,
        tangents=d,
        first_form=g,
        second_form=ii,
        normal=nvec,
        shape=SymMatrix(a_orth),
        shape_mixed=ginv @ ii,
        frame=frame,
        christoffel=christ,
        covariant_hessian=cov,
        step=h,
        order=order,
    )


def sl_of_patch(patch: ImmersionPatch, u, rho: float, h: float = DEFAULT_STEP,
                order: int = DEFAULT_ORDER) -> float:
    """rho-special Lagrangian curvature of the patch at ``u``."""
    return sl_value(fundamental_forms(patch, u, h, order).shape, rho)


# ---------------------------------------------------------------- families
@dataclass(frozen=True)
class FamilySpec:
    kind: str
    R: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise InvalidInputError(f"unknown family kind {self.kind!r}; expected one of {FAMILY_KINDS}")
        if not (self.R > 0.0 and math.isfinite(self.R)):
            raise InvalidInputError(f"family radius must be positive, got {self.R}")


def _gnomonic(w):
    """Unit vector ``(w, 1)/|(w, 1)|`` in ``R^(len(w)+1)``."""
    v = np.concatenate([w, [1.0]])
    return v / math.sqrt(float(v @ v))


def _box(n, half):
    return -half * np.ones(n), half * np.ones(n)


def _euclidean_sphere(model, R, n, half):
    def f(u):
        return R * _gnomonic(u)

    lo, hi = _box(n, half)
    return ImmersionPatch(model, lo, hi, f, outward=f, normal=lambda u: _gnomonic(u),
                          name=f"euclidean-sphere(R={R})")


def _geodesic_sphere(model, R, n, half):
    k = model.scale
    o = model.origin()

    def omega(u):
        return np.concatenate([[0.0], _gnomonic(u)])

    def f(u):
        return math.cosh(k * R) * o + math.sinh(k * R) / k * omega(u)

    def nrm(u):
        return k * math.sinh(k * R) * o + math.cosh(k * R) * omega(u)

    lo, hi = _box(n, half)
    return ImmersionPatch(model, lo, hi, f, outward=nrm, normal=nrm, name=f"geodesic-sphere(R={R})")


def _equidistant(model, R, n, half):
    k = model.scale
    top = np.zeros(n + 2)
    top[-1] = 1.0

    def base(u):
        return np.concatenate([[math.sqrt(1.0 / k ** 2 + float(u @ u))], u, [0.0]])

    def f(u):
        return math.cosh(k * R) * base(u) + math.sinh(k * R) / k * top

    def nrm(u):
        return k * math.sinh(k * R) * base(u) + math.cosh(k * R) * top

    lo, hi = _box(n, half)
    return ImmersionPatch(model, lo, hi, f, outward=nrm, normal=nrm, name=f"equidistant(R={R})")


def _tube(model, R, n, half):
    if n < 2:
        raise DomainError("tubes around geodesics need n >= 2")
    k = model.scale

    def gamma(t):
        g = np.zeros(n + 2)
        g[0] = math.cosh(k * t) / k
        g[1] = math.sinh(k * t) / k
        return g

    def omega(w):
        return np.concatenate([[0.0, 0.0], _gnomonic(w)])

    def f(u):
        return math.cosh(k * R) * gamma(u[0]) + math.sinh(k * R) / k * omega(u[1:])

    def nrm(u):
        return k * math.sinh(k * R) * gamma(u[0]) + math.cosh(k * R) * omega(u[1:])

    lo, hi = _box(n, half)
    return ImmersionPatch(model, lo, hi, f, outward=nrm, normal=nrm, name=f"tube(R={R})")


def _through_chart(patch, pert: MetricPerturbation):
    """Express a base-model patch in the chart coordinates of a perturbation."""
    base = patch

    def f(u):
        return pert.to_chart(base(u))

    return ImmersionPatch(pert, base.lo, base.hi, f, base.orientation, None, None,
                          base.name + "[perturbed]")


def make_family(spec: FamilySpec, model, half_width: float = 0.5) -> ImmersionPatch:
    """Closed-form patch of a homogeneous family.

    Chart boxes are ``[-half_width, half_width]^n`` centred on a point of
    the family; the normal is the exterior one, so all families are convex.
    """
    if isinstance(model, MetricPerturbation):
        base_patch = make_family(spec, model.base, half_width)
        return _through_chart(base_patch, model)
    n = model.dim - 1
    kind = spec.kind
    if kind == "euclidean-sphere":
        if model.is_hyperbolic:
            raise DomainError("euclidean-sphere family needs a Euclidean model")
        return _euclidean_sphere(model, spec.R, n, half_width)
    if kind == "revolution-profile":
        from .revolution import profile_patch_from_spec

        return profile_patch_from_spec(spec, model)
    if not model.is_hyperbolic:
        raise DomainError(f"family {kind!r} needs a hyperbolic model")
    if kind == "geodesic-sphere":
        return _geodesic_sphere(model, spec.R, n, half_width)
    if kind == "equidistant":
        return _equidistant(model, spec.R, n, half_width)
    return _tube(model, spec.R, n, half_width)


def graph_patch(model, center, quad, cubic=0.0, half_width=0.2) -> ImmersionPatch:
    """Graph ``q = center + (u, h(u))`` over the first ``n`` chart coordinates.

    ``h(u) = u.T quad u / 2 + cubic * sum(u**3)``; used for random patches in
    chart-coordinate models (Euclidean or perturbed metrics).
    """
    center = np.asarray(center, dtype=float)
    quad = np.asarray(quad, dtype=float)
    n = quad.shape[0]
    if center.shape[0] != n + 1 or model.point_dim != n + 1:
        raise InvalidInputError("graph patches need chart-coordinate models of dimension n+1")

    def f(u):
        return center + np.concatenate([u, [0.5 * float(u @ quad @ u) + cubic * float(np.sum(u ** 3))]])

    up = np.zeros(n + 1)
    up[-1] = 1.0
    lo, hi = _box(n, half_width)
    return ImmersionPatch(model, lo, hi, f, outward=lambda u: up, name="graph")


def patch_from_descriptor(desc: dict) -> ImmersionPatch:
    """``{"model": {...}, "family": {"kind": ..., "R": ...}, "orientation": 1}``."""
    try:
        model = model_from_descriptor(desc["model"])
        fam = dict(desc["family"])
        kind = fam.pop("kind")
        R = float(fam.pop("R"))
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"bad patch descriptor: {desc!r}") from exc
    kind = {"tube": "tube-around-geodesic", "sphere": "euclidean-sphere"}.get(kind, kind)
    if kind == "euclidean-sphere" and isinstance(model, SpaceForm) and model.is_hyperbolic:
        kind = "geodesic-sphere"
    patch = make_family(FamilySpec(kind, R, fam), model)
    if int(desc.get("orientation", 1)) == -1:
        patch = patch.flipped()
    return patch

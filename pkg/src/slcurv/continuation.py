"""Newton continuation of equidistant hypersurfaces under conformal metric bumps.

Hyperbolic space ``H^{n+1}`` (``c = -1``) is written as the warped product

    x(a, Y, q) = cosh Y (cosh a q + sinh a e_1) + sinh Y e_{n+1},
    g = dY^2 + cosh^2 Y (da^2 + cosh^2 a g_{H^{n-1}}),

with ``q`` in the copy of ``H^{n-1}`` spanned by ``e_0, e_2..e_n``. The
equidistant ``N_R`` is ``Y = R``. A bump depending only on the model
coordinate ``x_1 = cosh Y sinh a`` keeps the isometries of ``H^{n-1}``, so
the perturbed hypersurfaces are graphs ``Y = R + f(a)`` and the constant
SL equation becomes a second-order ODE in ``a`` with Dirichlet data at
``a = +-L``.

Principal curvatures of ``Y = R + f(a)`` (``G = cosh Y``,
``v = sqrt(G^2 + Y'^2)``, normal angle ``beta`` with ``tan beta = Y'/G``):

    k_mer = -(G Y'' - Y'^2 sinh Y)/v^3 + sinh Y / v
    k_fib = cos(beta) tanh Y - sin(beta) tanh(a) / cosh Y

Under ``g~ = e^{2 sigma} g`` both become ``e^{-sigma}(k + d sigma(N))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .ambient import Bump, MetricPerturbation, SpaceForm
from .errors import DomainError, InvalidInputError, NewtonDivergenceError

__all__ = [
    "ReducedProblem",
    "ContinuationResult",
    "reduced_curvatures",
    "newton_continuation",
    "reduced_lemma_matrix",
    "graph_patch_in_perturbation",
]

_CSTEP = 1e-20


def reduced_curvatures(a, Y, Y1, Y2, eps, bump: Bump):
    """Meridian and fiber principal curvatures in the perturbed metric (complex-step safe)."""
    G = np.cosh(Y)
    sY = np.sinh(Y)
    v = np.sqrt(G * G + Y1 * Y1)
    sb, cb = Y1 / v, G / v
    k_mer = -(G * Y2 - Y1 * Y1 * sY) / v ** 3 + sY / v
    k_fib = cb * np.tanh(Y) - sb * np.tanh(a) / G
    if eps == 0.0:
        return k_mer, k_fib
    x1 = G * np.sinh(a)
    c0 = float(bump.center[0]) if len(bump.center) else 0.0
    w2 = bump.width ** 2
    b = np.exp(-((x1 - c0) ** 2) / w2)
    db = -2.0 * (x1 - c0) / w2 * b
    conf = 1.0 + eps * b
    dx1 = -sb * np.cosh(a) + cb * sY * np.sinh(a)
    dsig = 0.5 * eps * db * dx1 / conf
    scale = 1.0 / np.sqrt(conf)
    return scale * (k_mer + dsig), scale * (k_fib + dsig)


@dataclass
class ReducedProblem:
    n: int
    rho: float
    R: float
    bump: Bump
    half_length: float = 3.0
    grid_size: int = 201

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("continuation needs n >= 2")
        if not (self.rho > 0 and self.R > 0):
            raise DomainError("rho and R must be positive")
        if self.bump.kind != "slab" or self.bump.axis != 1:
            raise DomainError("continuation needs a slab bump in the model coordinate x_1")
        if self.grid_size < 5:
            raise InvalidInputError("grid too small")
        self.a = np.linspace(-self.half_length, self.half_length, self.grid_size)
        self.h = float(self.a[1] - self.a[0])
        self.theta = self.n * math.atan(self.rho * math.tanh(self.R))

    @property
    def J_start(self) -> float:
        t = math.tanh(self.R)
        return self.n * self.rho * (1 - t * t) / (1 + (self.rho * t) ** 2)

    def _jets(self, f):
        full = np.concatenate([[0.0], f, [0.0]])
        Y = self.R + full[1:-1]
        Y1 = (full[2:] - full[:-2]) / (2 * self.h)
        Y2 = (full[2:] - 2 * full[1:-1] + full[:-2]) / self.h ** 2
        return Y, Y1, Y2

    def _F(self, a, Y, Y1, Y2, eps):
        km, kf = reduced_curvatures(a, Y, Y1, Y2, eps, self.bump)
        return np.arctan(self.rho * km) + (self.n - 1) * np.arctan(self.rho * kf) - self.theta

    def residual(self, f, eps: float) -> np.ndarray:
        """Discrete ``SL_rho - theta`` at interior nodes; ``f`` holds interior values."""
        Y, Y1, Y2 = self._jets(np.asarray(f, dtype=float))
        with np.errstate(over="ignore", invalid="ignore"):
            return np.real(self._F(self.a[1:-1], Y, Y1, Y2, eps))

    def jacobian(self, f, eps: float) -> np.ndarray:
        """Exact Jacobian of :meth:`residual` (tridiagonal, dense storage)."""
        Y, Y1, Y2 = self._jets(np.asarray(f, dtype=float))
        a = self.a[1:-1]
        with np.errstate(over="ignore", invalid="ignore"):
            dY = self._F(a, Y + 1j * _CSTEP, Y1, Y2, eps).imag / _CSTEP
            dY1 = self._F(a, Y, Y1 + 1j * _CSTEP, Y2, eps).imag / _CSTEP
            dY2 = self._F(a, Y, Y1, Y2 + 1j * _CSTEP, eps).imag / _CSTEP
        h = self.h
        m = len(a)
        jac = np.diag(dY - 2.0 * dY2 / h ** 2)
        lower = -dY1[1:] / (2 * h) + dY2[1:] / h ** 2
        upper = dY1[:-1] / (2 * h) + dY2[:-1] / h ** 2
        jac[np.arange(1, m), np.arange(m - 1)] = lower
        jac[np.arange(m - 1), np.arange(1, m)] = upper
        return jac


def reduced_lemma_matrix(prob: ReducedProblem) -> np.ndarray:
    """The linearized operator divided by ``sqrt(det)`` at ``N_R``, discretized.

    ``rho/(1 + rho^2 t^2) * [-(f'' + (n-1) tanh(a) f')/cosh^2 R + n (1 - t^2) f]``
    with ``t = tanh R``: the Hessian of ``f`` on ``N_R`` in the warped
    metric, ``W = I`` and ``A = t I``.
    """
    t = math.tanh(prob.R)
    a = prob.a[1:-1]
    h = prob.h
    m = len(a)
    pre = prob.rho / (1 + (prob.rho * t) ** 2)
    c2 = 1.0 / math.cosh(prob.R) ** 2
    diag = pre * (2.0 * c2 / h ** 2 + prob.n * (1 - t * t)) * np.ones(m)
    lower = pre * (-c2) * (1.0 / h ** 2 - (prob.n - 1) * np.tanh(a[1:]) / (2 * h))
    upper = pre * (-c2) * (1.0 / h ** 2 + (prob.n - 1) * np.tanh(a[:-1]) / (2 * h))
    mat = np.diag(diag)
    mat[np.arange(1, m), np.arange(m - 1)] = lower
    mat[np.arange(m - 1), np.arange(1, m)] = upper
    return mat


@dataclass
class ContinuationResult:
    a: np.ndarray
    records: list = field(default_factory=list)
    profiles: list = field(default_factory=list)

    def as_dicts(self) -> list:
        return [dict(r) for r in self.records]


def newton_continuation(R: float, perturbation: MetricPerturbation, eps_path, grid_size: int = 201,
                        rho: float = 1.0, half_length: float = 3.0, tol: float = 1e-8,
                        max_iter: int = 20, f0=None) -> ContinuationResult:
    """Follow ``SL_rho = n atan(rho tanh R)`` from ``N_R`` along ``eps_path``.

    The bump of ``perturbation`` is used with the epsilons of the path; its
    own ``epsilon`` is ignored. Each step starts Newton from the previous
    solution. Records carry ``eps, newton_iters, residual, f_norm`` and the
    residual history.
    """
    base = perturbation.base
    if not (base.is_hyperbolic and abs(base.curvature + 1.0) < 1e-15):
        raise DomainError("continuation is implemented for c = -1")
    prob = ReducedProblem(base.dim - 1, rho, R, perturbation.bump, half_length, grid_size)
    if not prob.J_start > 0.0:
        raise DomainError("zeroth-order term is not positive on the start family")
    f = np.zeros(grid_size - 2) if f0 is None else np.array(f0, dtype=float)
    out = ContinuationResult(prob.a)
    out.problem = prob
    for eps in eps_path:
        eps = float(eps)
        F = prob.residual(f, eps)
        hist = [float(np.max(np.abs(F)))]
        it = 0
        while not hist[-1] <= tol:  # NaN must not pass as converged
            if it >= max_iter or not np.isfinite(hist[-1]):
                raise NewtonDivergenceError(f"Newton failed at eps={eps}", hist[-1], it)
            try:
                f = f - np.linalg.solve(prob.jacobian(f, eps), F)
            except np.linalg.LinAlgError as exc:
                raise NewtonDivergenceError(f"singular Jacobian at eps={eps}", hist[-1], it) from exc
            F = prob.residual(f, eps)
            hist.append(float(np.max(np.abs(F))))
            it += 1
        out.records.append({
            "eps": eps,
            "newton_iters": it,
            "residual": hist[-1],
            "f_norm": float(np.max(np.abs(f))) if len(f) else 0.0,
            "history": hist,
        })
        out.profiles.append(np.concatenate([[0.0], f, [0.0]]))
    return out


def graph_patch_in_perturbation(prob: ReducedProblem, f_full, eps: float, a0: float,
                                half_width: float = 0.1):
    """Full hypersurface ``Y = R + f(a)`` in the Poincare-ball chart of the perturbed metric.

    ``f`` is interpolated by a cubic spline; used to check reduced solutions
    against the general hypersurface numerics.
    """
    from .hypersurface import ImmersionPatch

    n = prob.n
    base = SpaceForm(n + 1, -1.0)
    pert = MetricPerturbation(base, eps, prob.bump)
    spl = CubicSpline(prob.a, f_full, bc_type="not-a-knot")

    def point(a, Y, w):
        q = np.zeros(n + 2)
        q[0] = math.sqrt(1.0 + float(w @ w))
        q[2:n + 1] = w
        e1 = np.zeros(n + 2)
        e1[1] = 1.0
        top = np.zeros(n + 2)
        top[-1] = 1.0
        return math.cosh(Y) * (math.cosh(a) * q + math.sinh(a) * e1) + math.sinh(Y) * top

    def fmap(u):
        a = a0 + u[0]
        return pert.to_chart(point(a, prob.R + float(spl(a)), u[1:]))

    def outward(u):
        a = a0 + u[0]
        Y = prob.R + float(spl(a))
        return pert.to_chart(point(a, Y + 1e-4, u[1:])) - pert.to_chart(point(a, Y - 1e-4, u[1:]))

    lo = -half_width * np.ones(n)
    hi = half_width * np.ones(n)
    return ImmersionPatch(pert, lo, hi, fmap, outward=outward, name=f"continuation(a={a0})")

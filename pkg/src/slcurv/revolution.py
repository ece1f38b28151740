"""Hypersurfaces of revolution with constant SL curvature.

A rotation hypersurface is generated by a unit-speed profile curve in a
two-dimensional orbit space with metric ``du^2 + G(u, .)^2 dv^2``. The
profile carries its inclination ``phi``; the unit normal is
``N = sin(phi) U1 - cos(phi) U2`` where ``U1`` points away from the rotation
axis and ``U2`` along it. Principal curvatures split into one meridian
curvature and ``n - 1`` equal parallel curvatures, and the constant-angle
condition ``atan(rho k_mer) + (n-1) atan(rho k_par) = theta`` is solved for
``k_mer``, which fixes ``phi'``.

Three coordinate systems are supported (``k = sqrt(-c)``):

``euclidean``   ``(r, z)``: ``x = (r omega, z)``;
                ``r' = cos phi``, ``z' = sin phi``,
                ``k_par = sin(phi)/r``, ``k_mer = phi'``.
``axis``        Fermi coordinates about a geodesic, ``r`` = distance to it,
                ``z`` = position along it, metric ``dr^2 + cosh^2(kr) dz^2``;
                ``r' = cos phi``, ``z' = sin(phi)/cosh(kr)``,
                ``k_par = k sin(phi) coth(kr)``,
                ``k_mer = phi' + k sin(phi) tanh(kr)``.
``hyperplane``  Fermi coordinates about a totally geodesic hyperplane,
                ``z`` = signed distance to it, ``r`` = radial distance
                inside it, metric ``dz^2 + cosh^2(kz) dr^2``;
                ``r' = cos(phi)/cosh(kz)``, ``z' = sin phi``,
                ``k_par = k sin(phi) coth(kr)/cosh(kz) - k cos(phi) tanh(kz)``,
                ``k_mer = phi' - k cos(phi) tanh(kz)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import make_interp_spline

from .ambient import SpaceForm
from .curvature import sl_value
from .errors import (
    AxisSingularityError,
    CurvatureBlowupError,
    DomainError,
    InvalidInputError,
)
from .hypersurface import DEFAULT_ORDER, DEFAULT_STEP, FamilySpec, ImmersionPatch, fundamental_forms, make_family

__all__ = [
    "ProfileState",
    "OdeParams",
    "ProfileRun",
    "DegenerationMember",
    "SYSTEMS",
    "closed_form_sl",
    "closed_form_initial",
    "radius_for_theta",
    "principal_curvatures",
    "profile_rhs",
    "integrate_profile",
    "profile_patch",
    "profile_residuals",
    "profile_residual",
    "offset_profile",
    "tube_match_rho",
    "degeneration_family",
    "PROFILE_CSV_COLUMNS",
]

SYSTEMS = ("euclidean", "axis", "hyperplane")
PROFILE_CSV_COLUMNS = ("s", "r", "z", "phi", "kappa_mer", "kappa_par", "sl_residual")


@dataclass(frozen=True)
class ProfileState:
    s: float
    r: float
    z: float
    phi: float

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.z, self.phi])


@dataclass(frozen=True)
class OdeParams:
    n: int
    rho: float
    theta: float
    c: float = 0.0
    system: str | None = None
    r_min: float = 1e-4
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = 0.05
    delta_guard: float = 1e-4

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("revolution hypersurfaces need n >= 2")
        if not self.rho > 0.0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        if not 0.0 < self.theta < self.n * math.pi / 2:
            raise DomainError(f"theta={self.theta} outside (0, n pi/2)")
        if self.c > 0.0:
            raise DomainError("only c <= 0 ambients are supported")
        system = self.system or ("euclidean" if self.c == 0.0 else "axis")
        if system not in SYSTEMS:
            raise InvalidInputError(f"unknown coordinate system {system!r}")
        if (system == "euclidean") != (self.c == 0.0):
            raise DomainError(f"system {system!r} does not match curvature c={self.c}")
        if not (self.rtol > 0 and self.atol > 0 and self.r_min > 0):
            raise InvalidInputError("tolerances must be positive")
        object.__setattr__(self, "system", system)

    @property
    def k(self) -> float:
        return math.sqrt(-self.c)


@dataclass
class ProfileRun:
    samples: list
    params: OdeParams
    stop_reason: str | None = None
    s_stop: float | None = None
    kappa_mer: np.ndarray = field(default=None, repr=False)
    kappa_par: np.ndarray = field(default=None, repr=False)

    def arrays(self) -> dict:
        return {
            "s": np.array([p.s for p in self.samples]),
            "r": np.array([p.r for p in self.samples]),
            "z": np.array([p.z for p in self.samples]),
            "phi": np.array([p.phi for p in self.samples]),
        }


# ------------------------------------------------------------ closed forms
def closed_form_sl(kind: str, R: float, rho: float, n: int, c: float = -1.0) -> float:
    """SL curvature of the homogeneous families in a space form of curvature ``c``."""
    if not R > 0.0:
        raise DomainError(f"R must be positive, got {R}")
    if kind in ("euclidean-sphere", "sphere"):
        if c != 0.0:
            raise DomainError("euclidean-sphere needs c = 0")
        return n * math.atan(rho / R)
    if c >= 0.0:
        raise DomainError(f"family {kind!r} needs c < 0")
    k = math.sqrt(-c)
    if kind == "equidistant":
        return n * math.atan(rho * k * math.tanh(k * R))
    if kind == "geodesic-sphere":
        return n * math.atan(rho * k / math.tanh(k * R))
    if kind in ("tube", "tube-around-geodesic"):
        return (n - 1) * math.atan(rho * k / math.tanh(k * R)) + math.atan(rho * k * math.tanh(k * R))
    raise DomainError(f"unsupported family {kind!r}")


def radius_for_theta(kind: str, n: int, rho: float, theta: float, c: float = 0.0) -> float:
    """Radius of the sphere/equidistant/geodesic-sphere member with SL curvature ``theta``."""
    t = math.tan(theta / n) / rho
    if not 0.0 < theta / n < math.pi / 2:
        raise DomainError("theta/n must lie in (0, pi/2)")
    if kind in ("euclidean-sphere", "sphere"):
        return 1.0 / t
    k = math.sqrt(-c)
    if kind == "equidistant":
        if t >= k:
            raise DomainError("equidistants have principal curvature < k")
        return math.atanh(t / k) / k
    if kind == "geodesic-sphere":
        if t <= k:
            raise DomainError("geodesic spheres have principal curvature > k")
        return math.atanh(k / t) / k
    raise DomainError(f"no closed-form radius for {kind!r}")


def closed_form_initial(kind: str, R: float, params: OdeParams, r0: float | None = None) -> ProfileState:
    """Initial profile state of a homogeneous family of radius ``R``.

    Spheres, geodesic spheres and tubes start at ``r = R`` with vertical
    tangent; equidistants (hyperplane system) start at ``z = R`` with
    ``phi = pi`` and ``r = r0`` moving towards the axis.
    """
    system = params.system
    if kind in ("euclidean-sphere", "sphere"):
        if system != "euclidean":
            raise DomainError("Euclidean sphere profiles need the euclidean system")
        return ProfileState(0.0, R, 0.0, math.pi / 2)
    if kind == "geodesic-sphere":
        if system == "euclidean":
            raise DomainError("geodesic spheres need a hyperbolic system")
        return ProfileState(0.0, R, 0.0, math.pi / 2)
    if kind in ("tube", "tube-around-geodesic"):
        if system != "axis":
            raise DomainError("tube profiles live in the axis system")
        return ProfileState(0.0, R, 0.0, math.pi / 2)
    if kind == "equidistant":
        if system != "hyperplane":
            raise DomainError("equidistant profiles live in the hyperplane system")
        return ProfileState(0.0, 2.0 if r0 is None else r0, R, math.pi)
    raise DomainError(f"unsupported family {kind!r}")


# --------------------------------------------------------------- the ODE
def principal_curvatures(r, z, phi, dphi, params: OdeParams) -> tuple[float, float]:
    """Meridian and parallel principal curvatures of the profile at a state."""
    k = params.k
    if params.system == "euclidean":
        return dphi, math.sin(phi) / r
    if params.system == "axis":
        kp = k * math.sin(phi) / math.tanh(k * r)
        return dphi + k * math.sin(phi) * math.tanh(k * r), kp
    tz = k * math.tanh(k * z)
    kp = k * math.sin(phi) / (math.tanh(k * r) * math.cosh(k * z)) - math.cos(phi) * tz
    return dphi - math.cos(phi) * tz, kp


def _kappa_par(r, z, phi, params):
    return principal_curvatures(r, z, phi, 0.0, params)[1]


def _correction(r, z, phi, params):
    """``k_mer - phi'`` in the chosen system."""
    return principal_curvatures(r, z, phi, 0.0, params)[0]


def _velocity(r, z, phi, params):
    k = params.k
    if params.system == "euclidean":
        return math.cos(phi), math.sin(phi)
    if params.system == "axis":
        return math.cos(phi), math.sin(phi) / math.cosh(k * r)
    return math.cos(phi) / math.cosh(k * z), math.sin(phi)


def _deficit(r, z, phi, params):
    return params.theta - (params.n - 1) * math.atan(params.rho * _kappa_par(r, z, phi, params))


def profile_rhs(state: ProfileState, params: OdeParams) -> np.ndarray:
    """``(r', z', phi')`` at ``state``; raises on axis contact or curvature blow-up."""
    r, z, phi = state.r, state.z, state.phi
    if not r > params.r_min:
        raise AxisSingularityError(f"r={r} <= r_min={params.r_min}")
    delta = _deficit(r, z, phi, params)
    if not abs(delta) < math.pi / 2:
        raise CurvatureBlowupError(f"angle deficit {delta} outside (-pi/2, pi/2)")
    kmer = math.tan(delta) / params.rho
    dr, dz = _velocity(r, z, phi, params)
    return np.array([dr, dz, kmer - _correction(r, z, phi, params)])


def integrate_profile(init: ProfileState, params: OdeParams, s_max: float,
                      n_samples: int | None = None) -> ProfileRun:
    """Integrate the profile ODE from ``init`` up to arclength ``s_max``.

    Uses an adaptive 8th-order Runge-Kutta method (DOP853). Axis contact and
    curvature blow-up are terminal events; the run then ends with a stop
    reason instead of raising. With ``n_samples`` the dense output is
    sampled on a uniform arclength grid, otherwise at accepted steps.
    """
    profile_rhs(init, params)  # validates the starting state

    def rhs(s, y):
        r = max(y[0], 0.5 * params.r_min)
        delta = _deficit(r, y[1], y[2], params)
        lim = math.pi / 2 - 0.5 * params.delta_guard
        delta = min(max(delta, -lim), lim)
        dr, dz = _velocity(r, y[1], y[2], params)
        return [dr, dz, math.tan(delta) / params.rho - _correction(r, y[1], y[2], params)]

    def axis(s, y):
        return y[0] - params.r_min

    def blowup(s, y):
        r = max(y[0], 0.5 * params.r_min)
        return math.pi / 2 - params.delta_guard - abs(_deficit(r, y[1], y[2], params))

    axis.terminal = True
    axis.direction = -1
    blowup.terminal = True
    blowup.direction = -1
    sol = solve_ivp(rhs, (init.s, init.s + s_max), init.as_array(), method="DOP853",
                    rtol=params.rtol, atol=params.atol, max_step=params.max_step,
                    events=(axis, blowup), dense_output=n_samples is not None)
    stop, s_stop = None, None
    if sol.status < 0:
        # sin(phi)/r is stiff next to the axis and tan(delta) near |delta| = pi/2;
        # a step-size collapse in either regime is the corresponding stop
        r_end, z_end, phi_end = sol.y[:, -1]
        if r_end <= 100 * params.r_min:
            stop = "axis"
        elif abs(_deficit(max(r_end, params.r_min), z_end, phi_end, params)) > math.pi / 2 - 1e-2:
            stop = "curvature-blowup"
        else:
            raise DomainError(f"profile integration failed: {sol.message}")
        s_stop = float(sol.t[-1])
    for name, ev in zip(("axis", "curvature-blowup"), sol.t_events):
        if len(ev):
            stop, s_stop = name, float(ev[0])
    if stop == "curvature-blowup" and sol.y[0, -1] <= 100 * params.r_min:
        stop = "axis"  # the deficit degenerates as r -> 0 on profiles meeting the axis
    if n_samples is not None:
        ss = np.linspace(init.s, sol.t[-1], n_samples)
        ys = sol.sol(ss)
    else:
        ss, ys = sol.t, sol.y
    samples = [ProfileState(float(s), float(y[0]), float(y[1]), float(y[2])) for s, y in zip(ss, ys.T)]
    kmer, kpar = [], []
    for p in samples:
        d = rhs(p.s, p.as_array())
        km, kp = principal_curvatures(max(p.r, 0.5 * params.r_min), p.z, p.phi, d[2], params)
        kmer.append(km)
        kpar.append(kp)
    return ProfileRun(samples, params, stop, s_stop, np.array(kmer), np.array(kpar))


# ---------------------------------------------------------- reconstruction
def _gnomonic(w):
    v = np.concatenate([w, [1.0]])
    return v / math.sqrt(float(v @ v))


def _embed(system, k, n, r, z, omega):
    """Ambient point of the orbit-space point ``(r, z)`` on the fiber direction ``omega``."""
    if system == "euclidean":
        return np.concatenate([r * omega, [z]])
    x = np.zeros(n + 2)
    if system == "axis":
        x[0] = math.cosh(k * r) * math.cosh(k * z) / k
        x[1] = math.cosh(k * r) * math.sinh(k * z) / k
        x[2:] = math.sinh(k * r) / k * omega
        return x
    x[0] = math.cosh(k * z) * math.cosh(k * r) / k
    x[1:n + 1] = math.cosh(k * z) * math.sinh(k * r) / k * omega
    x[n + 1] = math.sinh(k * z) / k
    return x


def _frame_vectors(system, k, n, r, z, omega):
    """Unit vectors ``U1`` (away from the axis) and ``U2`` (along it)."""
    if system == "euclidean":
        return np.concatenate([omega, [0.0]]), np.eye(n + 1)[n]
    u1, u2 = np.zeros(n + 2), np.zeros(n + 2)
    if system == "axis":
        g = np.zeros(n + 2)
        g[0], g[1] = math.cosh(k * z) / k, math.sinh(k * z) / k
        u1 = k * math.sinh(k * r) * g
        u1[2:] = math.cosh(k * r) * omega
        u2[0], u2[1] = math.sinh(k * z), math.cosh(k * z)
        return u1, u2
    u1[0] = math.sinh(k * r)
    u1[1:n + 1] = math.cosh(k * r) * omega
    b = np.zeros(n + 2)
    b[0] = math.cosh(k * r) / k
    b[1:n + 1] = math.sinh(k * r) / k * omega
    u2 = k * math.sinh(k * z) * b
    u2[n + 1] = math.cosh(k * z)
    return u1, u2


def _model_for(params: OdeParams):
    return SpaceForm(params.n + 1, params.c)


def profile_patch(run: ProfileRun, index: int, half_width: float = 0.05, model=None) -> ImmersionPatch:
    """Revolution patch around sample ``index`` built from sampled positions only.

    Positions ``(r, z)`` are interpolated by a degree-7 spline in arclength;
    the chart is ``(sigma, w)`` with ``s = s_index + sigma`` and ``w`` a
    gnomonic chart of the fiber sphere. The sampled inclination is used only
    to orient the normal.
    """
    p = run.params
    arr = run.arrays()
    s = arr["s"]
    if len(s) < 9:
        raise InvalidInputError("need at least 9 profile samples to reconstruct a patch")
    spl = make_interp_spline(s, np.column_stack([arr["r"], arr["z"]]), k=7)
    phi = make_interp_spline(s, arr["phi"], k=3)
    s0 = s[index]
    lo_s = max(s[0] - s0, -half_width)
    hi_s = min(s[-1] - s0, half_width)
    if hi_s - lo_s <= 0:
        raise InvalidInputError("degenerate profile window")
    system, k, n = p.system, (p.k if p.c < 0 else 0.0), p.n
    model = model or _model_for(p)

    def f(u):
        rz = spl(s0 + u[0])
        return _embed(system, k, n, float(rz[0]), float(rz[1]), _gnomonic(u[1:]))

    def outward(u):
        rz = spl(s0 + u[0])
        u1, u2 = _frame_vectors(system, k, n, float(rz[0]), float(rz[1]), _gnomonic(u[1:]))
        ph = float(phi(s0 + u[0]))
        return math.sin(ph) * u1 - math.cos(ph) * u2

    lo = np.concatenate([[lo_s], -0.2 * np.ones(n - 1)])
    hi = np.concatenate([[hi_s], 0.2 * np.ones(n - 1)])
    return ImmersionPatch(model, lo, hi, f, outward=outward, name=f"revolution[{index}]")


def profile_patch_from_spec(spec: FamilySpec, model) -> ImmersionPatch:
    """``revolution-profile`` family: ``params`` holds ``run`` and ``index``."""
    try:
        run = spec.params["run"]
        index = int(spec.params.get("index", len(run.samples) // 2))
    except (KeyError, AttributeError) as exc:
        raise InvalidInputError("revolution-profile family needs params['run']") from exc
    return profile_patch(run, index, model=model)


def profile_residuals(run: ProfileRun, max_points: int = 25, r_floor: float = 1e-2,
                      h: float = DEFAULT_STEP, order: int = DEFAULT_ORDER) -> np.ndarray:
    """``SL_rho - theta`` at up to ``max_points`` samples, NaN where not evaluated.

    Samples closer than the stencil reach to the ends of the profile, or with
    ``r < r_floor`` (fiber spheres too small to resolve), are skipped.
    """
    p = run.params
    arr = run.arrays()
    s = arr["s"]
    reach = 4 * h
    out = np.full(len(s), np.nan)
    ok = np.where((s - s[0] > reach) & (s[-1] - s > reach) & (arr["r"] > r_floor))[0]
    if len(ok) == 0:
        return out
    pick = ok[np.unique(np.linspace(0, len(ok) - 1, min(max_points, len(ok))).round().astype(int))]
    for j in pick:
        patch = profile_patch(run, int(j))
        u = np.zeros(p.n)
        fd = fundamental_forms(patch, u, h, order)
        out[j] = sl_value(fd.shape, p.rho) - p.theta
    return out


def profile_residual(run: ProfileRun, max_points: int = 25, **kw) -> float:
    """Max over evaluated samples of ``|SL_rho - theta|`` from the reconstructed hypersurface."""
    res = profile_residuals(run, max_points, **kw)
    if np.all(np.isnan(res)):
        raise InvalidInputError("no sample of the profile could be evaluated")
    return float(np.nanmax(np.abs(res)))


def offset_profile(run: ProfileRun, dphi: float) -> ProfileRun:
    """Profile whose inclination is shifted by ``dphi`` with positions re-integrated to match.

    The result is a smooth unit-speed curve that no longer solves the ODE;
    used to check that the residual detects wrong profiles.
    """
    p = run.params
    arr = run.arrays()
    phi = make_interp_spline(arr["s"], arr["phi"], k=5)
    s = arr["s"]

    def rhs(t, y):
        return list(_velocity(y[0], y[1], float(phi(t)) + dphi, p))

    sol = solve_ivp(rhs, (s[0], s[-1]), [arr["r"][0], arr["z"][0]], method="DOP853",
                    rtol=1e-12, atol=1e-13, t_eval=s)
    samples = [ProfileState(float(t), float(y[0]), float(y[1]), float(phi(t)) + dphi)
               for t, y in zip(sol.t, sol.y.T)]
    return replace(run, samples=samples, stop_reason=None, kappa_mer=None, kappa_par=None)


# ------------------------------------------------------------------ tubes
def tube_match_rho(n: int, R: float, c: float = -1.0) -> float:
    """The ``rho`` at which the tube of radius ``R`` has SL curvature ``(n-1) pi/2``.

    ``(n-1) atan(rho k coth kR) + atan(rho k tanh kR)`` increases from 0 to
    ``n pi/2`` in ``rho``; the root is found by bisection.
    """
    if n < 2 or not R > 0.0 or c >= 0.0:
        raise DomainError("tube_match_rho needs n >= 2, R > 0, c < 0")
    target = (n - 1) * math.pi / 2

    def F(rho):
        return closed_form_sl("tube", R, rho, n, c) - target

    lo, hi = 0.0, 1.0
    while F(hi) < 0.0:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if F(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class DegenerationMember:
    R: float
    rho: float
    f_tau: float
    f_tau_closed: float
    min_horizontal_sv: float
    sl_residual: float
    verticality_order: int

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def degeneration_family(n: int, radii, c: float = -1.0, tau: float | None = None,
                        vert_tol: float = 1e-6) -> list:
    """Exact constant-SL tubes at ``theta = (n-1) pi/2`` along decreasing radii.

    For each radius the matching ``rho`` is found by bisection; the lift and
    SL residual are computed numerically on the tube patch.
    """
    from .legendrian import f_tau as f_tau_fn
    from .legendrian import gauss_lift, horizontal_singular_values, verticality_order

    model = SpaceForm(n + 1, c)
    theta = (n - 1) * math.pi / 2
    tau = 1.0 / (2 * n) if tau is None else tau
    out = []
    for R in radii:
        rho = tube_match_rho(n, R, c)
        patch = make_family(FamilySpec("tube-around-geodesic", R), model)
        u = np.zeros(n)
        frame = gauss_lift(patch, u, rho, tau=tau)
        sv = horizontal_singular_values(frame)
        sl = sl_value(frame.shape, rho)
        k = math.sqrt(-c)
        spec = [k / math.tanh(k * R)] * (n - 1) + [k * math.tanh(k * R)]
        out.append(DegenerationMember(
            R=float(R),
            rho=rho,
            f_tau=frame.f_tau,
            f_tau_closed=f_tau_fn(np.diag(spec), rho, tau),
            min_horizontal_sv=float(sv.min()),
            sl_residual=abs(sl - theta),
            verticality_order=verticality_order(frame, vert_tol),
        ))
    return out

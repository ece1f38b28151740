"""Acceptance criteria 1-14, one test each.

Every test records a PASS/FAIL line (collected into the terminal summary by
``conftest.py``). Run this file directly to print the lines without pytest.
"""
import math
import time

import numpy as np
import pytest

from slcurv import kernels, verify
from slcurv.ambient import SpaceForm
from slcurv.curvature import gaussian_identities, r_theta, sl_value, special_angle_root
from slcurv.elliptic import GridProblem, cosh_benchmark, dirichlet_solve, preset_problem, supersolution_compare
from slcurv.hypersurface import FamilySpec, make_family, sl_of_patch
from slcurv.legendrian import gauss_lift, legendrian_report, lifted_metric_check
from slcurv.linearization import (
    DeformationField,
    fd_shape_derivative,
    fd_variation,
    j_positivity_scan,
    linearized_L,
    low_frequency_mode,
    newton_continuation,
)
from slcurv.ambient import Bump, MetricPerturbation
from slcurv.revolution import (
    OdeParams,
    closed_form_initial,
    closed_form_sl,
    degeneration_family,
    integrate_profile,
    profile_residuals,
    tube_match_rho,
)

RESULTS = {}
SEED = 20240607


def record(k, passed, detail):
    line = f"criterion {k:2d} {'PASS' if passed else 'FAIL'}  {detail}"
    RESULTS[k] = line
    return passed


def random_spd_stack(rng, m, n, lo=0.1, hi=10.0):
    q, _ = np.linalg.qr(rng.normal(size=(m, n, n)))
    lam = np.exp(rng.uniform(math.log(lo), math.log(hi), size=(m, n)))
    return np.einsum("mij,mj,mkj->mik", q, lam, q)


def rng_for(k):
    return np.random.default_rng([SEED, k])


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# ---------------------------------------------------------------------------
def test_c01_inversion_consistency():
    rng = rng_for(1)

    def body():
        worst = 0.0
        for n in (2, 3, 4, 5):
            stack = random_spd_stack(rng, 10_000, n)
            th = rng.uniform(0.1, n * math.pi / 2 - 0.1, size=10_000)
            for a, t in zip(stack, th):
                worst = max(worst, abs(sl_value(a, r_theta(a, t)) - t))
        return worst

    worst, secs = timed(body)
    ok = worst <= 1e-11 and secs < 2.0
    assert record(1, ok, f"max|SL - theta| = {worst:.2e} (<= 1e-11), {secs:.2f} s (< 2 s, {kernels.BACKEND})")


def test_c02_gaussian_curvature_n2():
    rng = rng_for(2)
    worst = max(abs(gaussian_identities(a).k_check) for a in random_spd_stack(rng, 1000, 2))
    assert record(2, worst <= 1e-10, f"max|R_(pi/2)^-2 - det A| = {worst:.2e} (<= 1e-10)")


def test_c03_k_over_h_n3():
    rng = rng_for(3)
    worst = max(abs(gaussian_identities(a).kh_check) for a in random_spd_stack(rng, 1000, 3))
    assert record(3, worst <= 1e-10, f"max|R_pi^-2 - det A / tr A| = {worst:.2e} (<= 1e-10, H = trace)")


def test_c04_special_angle_root():
    rng = rng_for(4)
    worst = 0.0
    for n in (2, 3, 4, 5):
        for a in random_spd_stack(rng, 1000, n):
            worst = max(worst, abs(special_angle_root(a) - r_theta(a, (n - 1) * math.pi / 2)))
    assert record(4, worst <= 1e-9, f"max|root - R_((n-1)pi/2)| = {worst:.2e} (<= 1e-9, corrected polynomial)")


def test_c05_equidistant_closed_form():
    def body():
        worst = 0.0
        for n in (2, 3):
            H = SpaceForm(n + 1, -1.0)
            for R in (0.1, 0.5, 1.0, 2.0):
                patch = make_family(FamilySpec("equidistant", R), H)
                for rho in (0.5, 1.0, 2.0):
                    worst = max(worst, abs(sl_of_patch(patch, patch.center, rho) - n * math.atan(rho * math.tanh(R))))
        return worst

    worst, secs = timed(body)
    ok = worst <= 1e-6 and secs < 5.0
    assert record(5, ok, f"max|SL - n atan(rho tanh R)| = {worst:.2e} (<= 1e-6), {secs:.2f} s (< 5 s)")


def _convex_families():
    out = []
    for n in (2, 3):
        E, H = SpaceForm(n + 1, 0.0), SpaceForm(n + 1, -1.0)
        out += [
            (n, "euclidean-sphere", 2.0, E),
            (n, "equidistant", 0.5493, H),
            (n, "geodesic-sphere", 0.8, H),
            (n, "tube-around-geodesic", 0.25, H),
        ]
    return out


def test_c06_gauss_lift_structure():
    rng = rng_for(6)
    rho = 1.3
    c_max = s_max = a_max = 0.0
    p_min = math.inf
    for n, kind, R, model in _convex_families():
        patch = make_family(FamilySpec(kind, R), model)
        th = closed_form_sl(kind, R, rho, n, model.curvature)
        for u in patch.sample(rng, 4, margin=0.2):
            rep = legendrian_report(gauss_lift(patch, u, rho), th)
            c_max, s_max, a_max = max(c_max, rep.contact), max(s_max, rep.symplectic), max(a_max, rep.special_angle)
            p_min = min(p_min, rep.positivity_min)
    flip = make_family(FamilySpec("euclidean-sphere", 2.0), SpaceForm(4, 0.0)).flipped()
    flip_min = legendrian_report(gauss_lift(flip, np.zeros(3), rho), 1.0).positivity_min
    ok = max(c_max, s_max, a_max) <= 1e-8 and p_min >= -1e-10 and flip_min < 0.0
    assert record(6, ok, f"contact {c_max:.1e} symplectic {s_max:.1e} angle {a_max:.1e} (<= 1e-8), "
                         f"m-Gram min {p_min:.3g} (>= -1e-10), flipped {flip_min:.3g} (< 0)")


def test_c07_lifted_metric():
    rng = rng_for(7)
    fam = 0.0
    for n, kind, R, model in _convex_families():
        patch = make_family(FamilySpec(kind, R), model)
        for u in patch.sample(rng, 3, margin=0.2):
            fam = max(fam, lifted_metric_check(patch, u, 1.3).residual)
    pert = max(lifted_metric_check(p, np.zeros(3), 1.0).residual
               for p in verify._random_perturbed_patches(rng, 100))
    ok = fam <= 1e-8 and pert <= 1e-8
    assert record(7, ok, f"families {fam:.2e}, 100 perturbed patches {pert:.2e} (<= 1e-8)")


def test_c08_revolution_profiles():
    def body():
        worst = 0.0
        rho = 1.0
        for n in (2, 3):
            for R in (0.6, 1.0):
                p = OdeParams(n, rho, closed_form_sl("sphere", R, rho, n, 0.0), 0.0)
                run = integrate_profile(closed_form_initial("sphere", R, p), p, R, n_samples=201)
                worst = max(worst, float(np.nanmax(np.abs(profile_residuals(run, 25)))))
            for kind, system, R in (("equidistant", "hyperplane", 0.5), ("geodesic-sphere", "axis", 0.8)):
                p = OdeParams(n, rho, closed_form_sl(kind, R, rho, n, -1.0), -1.0, system)
                radius = 1 / math.tanh(R) if kind == "equidistant" else math.tanh(R)
                run = integrate_profile(closed_form_initial(kind, R, p), p, radius, n_samples=201)
                worst = max(worst, float(np.nanmax(np.abs(profile_residuals(run, 25)))))
        return worst

    worst, secs = timed(body)
    ok = worst <= 1e-6 and secs < 10.0
    assert record(8, ok, f"max|SL - theta| on reconstructed patches = {worst:.2e} (<= 1e-6), {secs:.2f} s (< 10 s)")


def test_c09_linearization():
    H, E = SpaceForm(4, -1.0), SpaceForm(4, 0.0)
    rho = 1.0
    diff = dev = da = 0.0
    points = (np.array([0.05, -0.1, 0.08]), np.array([-0.12, 0.04, 0.0]))
    for kind, R, model in (("equidistant", 1.0, H), ("geodesic-sphere", 1.5, H), ("euclidean-sphere", 2.0, E)):
        patch = make_family(FamilySpec(kind, R), model)
        th = closed_form_sl(kind, R, rho, 3, model.curvature)
        for fld in (DeformationField(patch, lambda x: 1.0, "one"), low_frequency_mode(patch)):
            for u in points:
                lin = linearized_L(fld, u, rho, th)
                e1 = abs(fd_variation(fld, u, rho, th, 2e-3) - lin.L_value)
                e2 = abs(fd_variation(fld, u, rho, th, 1e-3) - lin.L_value)
                diff = max(diff, e2)
                dev = max(dev, abs(e1 / e2 - 4.0))
                da = max(da, float(np.abs(fd_shape_derivative(fld, u) - lin.dA).max()))
    ok = diff <= 1e-5 and dev <= 0.5 and da <= 1e-5
    assert record(9, ok, f"|fd - L| = {diff:.2e} (<= 1e-5), Richardson ratio 4 +- {dev:.2f} (in [3.5, 4.5]), "
                         f"dA/dt entrywise {da:.2e} (<= 1e-5)")


def test_c10_j_nonnegative():
    rng = rng_for(10)
    mins = {}
    probes = {}
    for n in (2, 3):
        for rho in (1.0, 2.0):
            theta = min((n - 1) * math.pi / 2, n * math.atan(rho) * 0.999)
            mins[(n, rho)] = j_positivity_scan(1.0, rho, theta, n, 10_000, rng)
            probes[(n, rho)] = j_positivity_scan(1.0, rho, n * math.atan(rho) + 0.2, n, 10_000, rng).min_J
    bad = {k: v for k, v in mins.items() if v.min_J < -1e-10}
    probe_ok = all(v < 0.0 for v in probes.values())
    detail = ", ".join(f"n={n} rho={r:g}: {v.min_J:.3g}" for (n, r), v in mins.items())
    if bad:
        (n, r), worst = min(bad.items(), key=lambda kv: kv[1].min_J)
        detail += f"; violating spectrum n={n} rho={r:g}: {np.round(worst.argmin, 4).tolist()}"
    detail += f"; sharpness probe found J < 0: {probe_ok}"
    assert record(10, not bad and probe_ok, f"min J (>= -1e-10): {detail}")


def test_c11_continuation():
    def body():
        pert = MetricPerturbation(SpaceForm(4, -1.0), 0.0, Bump("slab", (0.0,), 0.7, 1))
        path = np.linspace(0.0, 0.01, 6)[1:]
        fwd = newton_continuation(0.5, pert, path, grid_size=201)
        back = newton_continuation(0.5, pert, list(path[::-1][1:]) + [0.0], grid_size=201,
                                   f0=fwd.profiles[-1][1:-1])
        return fwd.records, back.records

    (fwd, back), secs = timed(body)
    iters = max(r["newton_iters"] for r in fwd + back)
    res = max(r["residual"] for r in fwd + back)
    trip = back[-1]["f_norm"]
    ok = iters <= 5 and res <= 1e-8 and trip <= 1e-6 and secs < 10.0
    assert record(11, ok, f"Newton iterations {iters} (<= 5), residual {res:.1e} (<= 1e-8), "
                          f"round trip {trip:.1e} (<= 1e-6), {secs:.2f} s (< 10 s)")


def test_c12_degeneration():
    radii = [2.0 ** -m for m in range(9)]
    res = 0.0
    mono = True
    for n in (2, 3):
        fam = degeneration_family(n, radii)
        res = max(res, max(m.sl_residual for m in fam))
        ft = [m.f_tau for m in fam]
        sv = [m.min_horizontal_sv for m in fam]
        mono &= all(a > b for a, b in zip(ft, ft[1:])) and all(a > b for a, b in zip(sv, sv[1:]))
    rho_err = max(abs(tube_match_rho(3, R) ** 2 - (2 + math.tanh(R) ** 2)) for R in radii + [1.5, 3.0])
    ok = res <= 1e-8 and mono and rho_err <= 1e-10
    assert record(12, ok, f"tube SL residual {res:.1e} (<= 1e-8), f^(1/2n) and min sv strictly decreasing: {mono}, "
                          f"|rho^2 - (2 + tanh^2 R)| = {rho_err:.1e} (<= 1e-10)")


def _random_supersolution(rng, prob):
    """``u_phi + w`` with ``D w = -g <= 0`` and ``w >= 0`` on the boundary."""
    shape = prob.nodes
    phi = rng.normal(size=shape)
    base = prob.with_boundary(phi)
    extra = prob.with_boundary(np.abs(rng.normal(size=shape)) * rng.uniform(0.0, 1.0))
    g = np.abs(rng.normal(size=shape)) * rng.uniform(0.0, 5.0)
    F = dirichlet_solve(base) + dirichlet_solve(extra, source=-g)
    return base, F


def test_c13_dirichlet_solver():
    rng = rng_for(13)
    err, _, _ = cosh_benchmark(1001)
    ratio = cosh_benchmark(51)[0] / cosh_benchmark(101)[0]
    margin = math.inf
    held = 0
    for trial in range(100):
        if trial % 2:
            prob = preset_problem("aniso2d", 13)
        else:
            prob = GridProblem((0.0,), (1.0,), (41,), c=float(rng.uniform(0.2, 3.0)))
        base, F = _random_supersolution(rng, prob)
        verdict = supersolution_compare(base, F)
        held += verdict.status == "holds"
        margin = min(margin, verdict.margin) if np.isfinite(verdict.margin) else -math.inf
    ok = err <= 1e-6 and 3.5 <= ratio <= 4.5 and margin >= -1e-8 and held == 100
    assert record(13, ok, f"cosh max error {err:.2e} (<= 1e-6), refinement ratio {ratio:.3f}, "
                          f"supersolution comparisons held {held}/100, min margin {margin:.2e} (>= -1e-8)")


def test_c14_full_verify():
    a, secs = timed(lambda: verify.run("all", seed=7))
    b = verify.run("all", seed=7)
    same = a == b
    ok = secs < 60.0 and same
    assert record(14, ok, f"verify --suite all in {secs:.1f} s (< 60 s), deterministic: {same}, "
                          f"failing checks: {a['failures']}")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn()
            except AssertionError:
                pass
    for k in sorted(RESULTS):
        print(RESULTS[k])

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from slcurv.errors import AxisSingularityError, CurvatureBlowupError, DomainError, ProfileStop
from slcurv.revolution import (
    OdeParams,
    ProfileState,
    closed_form_initial,
    closed_form_sl,
    degeneration_family,
    integrate_profile,
    offset_profile,
    principal_curvatures,
    profile_residual,
    profile_rhs,
    radius_for_theta,
    tube_match_rho,
)


def _run(kind, system, n, R, c, rho=1.0, s_max=None, samples=121):
    p = OdeParams(n, rho, closed_form_sl(kind, R, rho, n, c), c, system)
    return integrate_profile(closed_form_initial(kind, R, p), p, s_max or R, n_samples=samples)


def test_closed_form_values():
    assert abs(closed_form_sl("sphere", 1.0, 1.0, 3, 0.0) - 0.75 * math.pi) < 1e-15
    assert abs(closed_form_sl("equidistant", 1.0, 1.0, 2) - 2 * math.atan(math.tanh(1.0))) < 1e-15
    # n = 3 tube at rho^2 = 2 + tanh^2 R has angle pi
    R = 0.5
    rho = math.sqrt(2 + math.tanh(R) ** 2)
    assert abs(closed_form_sl("tube", R, rho, 3) - math.pi) < 1e-14
    assert abs(radius_for_theta("sphere", 3, 1.0, math.pi) - 1 / math.sqrt(3)) < 1e-15
    with pytest.raises(DomainError):
        closed_form_sl("sphere", 1.0, 1.0, 3, -1.0)
    with pytest.raises(DomainError):
        radius_for_theta("equidistant", 3, 1.0, 3.0, -1.0)


def test_euclidean_sphere_profile_is_circle():
    run = _run("sphere", "euclidean", 3, 1.0, 0.0, s_max=1.2)
    a = run.arrays()
    assert np.max(np.abs(a["r"] - np.cos(a["s"]))) < 1e-9
    assert np.max(np.abs(a["z"] - np.sin(a["s"]))) < 1e-9
    assert np.allclose(run.kappa_mer, 1.0, atol=1e-9)


@pytest.mark.parametrize("kind,system,R", [
    ("geodesic-sphere", "axis", 0.8),
    ("tube", "axis", 0.6),
])
def test_axis_system_keeps_radius(kind, system, R):
    p = OdeParams(3, 1.0, closed_form_sl(kind, R, 1.0, 3, -1.0), -1.0, system)
    init = closed_form_initial(kind, R, p)
    if kind == "tube":
        # a tube is the constant-r solution with phi = pi/2
        run = integrate_profile(init, p, 1.0, n_samples=21)
        assert np.max(np.abs(run.arrays()["r"] - R)) < 1e-9
    else:
        run = integrate_profile(init, p, R, n_samples=81)
        assert profile_residual(run, max_points=7) < 1e-6


def test_equidistant_stays_at_height():
    run = _run("equidistant", "hyperplane", 3, 0.5, -1.0, s_max=1.0)
    assert np.max(np.abs(run.arrays()["z"] - 0.5)) < 1e-9
    assert profile_residual(run, max_points=7) < 1e-6


@pytest.mark.parametrize("n", [2, 3])
def test_residual_from_reconstruction(n):
    run = _run("geodesic-sphere", "axis", n, 0.9, -1.0, samples=161)
    assert profile_residual(run, max_points=9) < 1e-6


def test_offset_profile_detected():
    run = _run("equidistant", "hyperplane", 3, 0.5, -1.0, s_max=1.0)
    assert profile_residual(offset_profile(run, 1e-2), max_points=5) >= 1e-3
    run = _run("geodesic-sphere", "axis", 3, 0.8, -1.0)
    assert profile_residual(offset_profile(run, 1e-2), max_points=5) >= 1e-3


def test_axis_stop_is_clean():
    p = OdeParams(3, 1.0, math.pi, 0.0)
    run = integrate_profile(closed_form_initial("sphere", 1 / math.sqrt(3), p), p, 5.0)
    assert run.stop_reason == "axis"
    assert abs(run.s_stop - math.pi / (2 * math.sqrt(3))) < 1e-3


def test_blowup_stop():
    # theta too large for the starting radius: the deficit reaches pi/2 quickly
    p = OdeParams(3, 1.0, 3.0, 0.0)
    run = integrate_profile(ProfileState(0.0, 1.0, 0.5, math.pi / 2), p, 5.0)
    assert run.stop_reason == "curvature-blowup"
    assert 0.04 < run.s_stop < 0.06


def test_rhs_errors():
    p = OdeParams(3, 1.0, math.pi, 0.0)
    with pytest.raises(AxisSingularityError):
        profile_rhs(ProfileState(0.0, 0.0, 0.0, 1.0), p)
    with pytest.raises(CurvatureBlowupError) as exc:
        profile_rhs(ProfileState(0.0, 1e-3, 0.0, math.pi / 2), OdeParams(3, 1.0, 0.3, 0.0))
    assert isinstance(exc.value, ProfileStop) and exc.value.reason == "curvature-blowup"
    with pytest.raises(DomainError):
        OdeParams(3, 1.0, 5.0, 0.0)
    with pytest.raises(DomainError):
        OdeParams(3, 1.0, 1.0, -1.0, "euclidean")


def test_principal_curvatures_euclidean():
    p = OdeParams(2, 1.0, 1.0, 0.0)
    assert principal_curvatures(2.0, 0.0, math.pi / 2, 0.3, p) == (0.3, 0.5)


def test_tube_match_rho():
    for R in (0.1, 0.5, 1.0, 2.0):
        assert abs(tube_match_rho(3, R) ** 2 - (2 + math.tanh(R) ** 2)) < 1e-10
        assert abs(tube_match_rho(2, R) - 1.0) < 1e-12
    with pytest.raises(DomainError):
        tube_match_rho(3, 1.0, 0.0)


def test_degeneration_frozen():
    fam = degeneration_family(3, [1.0, 0.5])
    assert abs(fam[0].rho - 1.606245827507724) < 1e-12
    assert abs(fam[0].f_tau - 0.4879361295705217) < 1e-9
    assert abs(fam[1].min_horizontal_sv - 0.29662506905447317) < 1e-8
    assert all(m.sl_residual < 1e-8 for m in fam)


@pytest.mark.parametrize("n", [2, 3])
def test_degeneration_monotone(n):
    fam = degeneration_family(n, [2.0 ** -m for m in range(9)])
    ft = [m.f_tau for m in fam]
    sv = [m.min_horizontal_sv for m in fam]
    assert all(a > b for a, b in zip(ft, ft[1:]))
    assert all(a > b for a, b in zip(sv, sv[1:]))
    assert max(m.sl_residual for m in fam) < 1e-8
    assert all(abs(m.f_tau - m.f_tau_closed) < 1e-8 for m in fam)


@given(st.floats(0.3, 3.0), st.floats(0.3, 2.0))
def test_sphere_radius_inverts_closed_form(R, rho):
    th = closed_form_sl("sphere", R, rho, 3, 0.0)
    assert abs(radius_for_theta("sphere", 3, rho, th) - R) < 1e-12 * R

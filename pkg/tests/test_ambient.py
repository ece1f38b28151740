import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from slcurv.ambient import Bump, MetricPerturbation, SpaceForm, exp_map, lorentz, model_from_descriptor, ortho_frame
from slcurv.errors import DomainError, InvalidInputError


def _tangent(model, p, rng):
    return model.project(p, rng.normal(size=model.point_dim))


def test_hyperboloid_origin_and_residual():
    H = SpaceForm(4, -4.0)
    o = H.origin()
    assert o[0] == 0.5
    assert H.on_model_residual(o) == 0.0
    assert abs(float(lorentz(o, o)) + 0.25) < 1e-15


def test_exp_map_frozen():
    H = SpaceForm(2, -1.0)
    v = np.array([0.0, 1.0, 0.0])
    q = exp_map(H, H.origin(), v)
    assert np.allclose(q, [math.cosh(1.0), math.sinh(1.0), 0.0], atol=1e-15)
    assert abs(H.distance(H.origin(), q) - 1.0) < 1e-12
    E = SpaceForm(3, 0.0)
    assert np.array_equal(exp_map(E, np.ones(3), v), [1.0, 2.0, 1.0])


def test_exp_map_rejects_normal_vector():
    H = SpaceForm(2, -1.0)
    with pytest.raises(DomainError):
        exp_map(H, H.origin(), np.array([1.0, 0.0, 0.0]))


def test_curvature_convention(rng):
    for c in (-1.0, -0.3):
        H = SpaceForm(4, c)
        p = exp_map(H, H.origin(), _tangent(H, H.origin(), rng))
        x, y = _tangent(H, p, rng), _tangent(H, p, rng)
        assert abs(H.sectional(p, x, y) - c) < 1e-10
        # R(N, X) N = -c X for unit N orthogonal to X
        fr = ortho_frame(H, p, x)
        r = H.riemann(p, fr[-1], fr[0], fr[-1])
        assert np.allclose(r, -c * fr[0], atol=1e-12)


def test_parallel_transport_isometry(rng):
    H = SpaceForm(4, -1.0)
    for _ in range(10):
        p = exp_map(H, H.origin(), 0.7 * _tangent(H, H.origin(), rng))
        q = exp_map(H, p, 0.7 * _tangent(H, p, rng))
        u, w = _tangent(H, p, rng), _tangent(H, p, rng)
        tu, tw = H.parallel_transport(p, q, u), H.parallel_transport(p, q, w)
        assert abs(float(H.inner(q, tu, tw) - H.inner(p, u, w))) < 1e-10
        assert H.tangent_residual(q, tu) < 1e-12


def test_ortho_frame(rng):
    H = SpaceForm(4, -1.0)
    p = exp_map(H, H.origin(), _tangent(H, H.origin(), rng))
    seed = _tangent(H, p, rng)
    fr = ortho_frame(H, p, seed)
    gram = np.array([[float(H.inner(p, a, b)) for b in fr] for a in fr])
    assert np.allclose(gram, np.eye(4), atol=1e-12)
    assert np.allclose(fr[-1], seed / H.norm(p, seed))
    assert np.linalg.det(np.vstack([p, fr])) > 0


def test_perturbation_zero_epsilon_matches_base_curvature(rng):
    for base in (SpaceForm(3, 0.0), SpaceForm(3, -1.0)):
        pert = MetricPerturbation(base, 0.0, Bump("gaussian", (0.0, 0.0, 0.0), 1.0))
        q = rng.normal(scale=0.2, size=3)
        x, y, z = rng.normal(size=(3, 3))
        r1 = pert.riemann(q, x, y, z)
        r2 = pert.base_riemann(q, x, y, z)
        assert np.max(np.abs(r1 - r2)) < 1e-5 * (1 + np.abs(r2).max())


def test_perturbed_sectional_differs():
    base = SpaceForm(3, 0.0)
    pert = MetricPerturbation(base, 0.3, Bump("gaussian", (0.0, 0.0, 0.0), 0.5))
    k = pert.sectional(np.array([0.1, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0]))
    assert abs(k) > 1e-2


def test_chart_roundtrip(rng):
    pert = MetricPerturbation(SpaceForm(4, -2.0), 0.1, Bump())
    for _ in range(10):
        q = rng.normal(scale=0.1, size=4)
        assert np.allclose(pert.to_chart(pert.to_model(q)), q, atol=1e-14)
    with pytest.raises(DomainError):
        pert.base_factor(np.array([1.0, 0.0, 0.0, 0.0]))


def test_bump_bounds_hold(rng):
    pert = MetricPerturbation(SpaceForm(3, 0.0), 0.1, Bump("gaussian", (0.1, 0.0, 0.0), 0.4))
    assert pert.bump_bounds_ok(rng.normal(size=(200, 3)))


def test_descriptor_roundtrip():
    desc = {"type": "hyperbolic", "dim": 4, "curvature": -1.0,
            "perturbation": {"epsilon": 0.05, "bump": "slab", "center": [0.0], "width": 0.7, "axis": 1}}
    m = model_from_descriptor(desc)
    assert isinstance(m, MetricPerturbation)
    assert m.descriptor()["perturbation"]["bump"] == "slab"
    with pytest.raises(InvalidInputError):
        model_from_descriptor({"type": "spherical", "dim": 3})
    with pytest.raises(DomainError):
        SpaceForm(3, 1.0)


@given(st.floats(-3.0, -0.05), st.floats(0.0, 2.0))
def test_exp_stays_on_model(c, t):
    H = SpaceForm(2, c)
    v = np.array([0.0, t, -0.5 * t])
    q = H.exp_map(H.origin(), v)
    assert H.on_model_residual(q) <= 1e-12 * max(1.0, float(q @ q))

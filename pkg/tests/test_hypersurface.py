import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from slcurv.ambient import Bump, MetricPerturbation, SpaceForm
from slcurv.errors import DomainError, ImmersionDegeneracyError, InvalidInputError
from slcurv.hypersurface import (
    FamilySpec,
    ImmersionPatch,
    fundamental_forms,
    graph_patch,
    make_family,
    patch_from_descriptor,
    sl_of_patch,
)

H3 = SpaceForm(4, -1.0)
E3 = SpaceForm(4, 0.0)


@pytest.mark.parametrize("kind,R,model,expected", [
    ("euclidean-sphere", 2.0, E3, [0.5, 0.5, 0.5]),
    ("equidistant", 0.7, H3, [math.tanh(0.7)] * 3),
    ("geodesic-sphere", 0.7, H3, [1 / math.tanh(0.7)] * 3),
    ("tube-around-geodesic", 0.7, H3, [math.tanh(0.7)] + [1 / math.tanh(0.7)] * 2),
])
def test_family_principal_curvatures(kind, R, model, expected):
    patch = make_family(FamilySpec(kind, R), model)
    for u in (patch.center, np.array([0.2, -0.1, 0.15])):
        fd = fundamental_forms(patch, u)
        lam = np.linalg.eigvalsh(fd.shape.entries)
        assert np.max(np.abs(lam - sorted(expected))) < 1e-8


def test_general_curvature_scaling():
    H = SpaceForm(3, -4.0)
    patch = make_family(FamilySpec("equidistant", 0.3), H)
    lam = np.linalg.eigvalsh(fundamental_forms(patch, patch.center).shape.entries)
    assert np.allclose(lam, 2.0 * math.tanh(0.6), atol=1e-8)


def test_first_form_and_normal_of_sphere():
    patch = make_family(FamilySpec("euclidean-sphere", 2.0), E3)
    fd = fundamental_forms(patch, patch.center)
    assert np.allclose(fd.first_form, 4.0 * np.eye(3), atol=1e-9)
    assert np.allclose(fd.normal, [0, 0, 0, 1], atol=1e-12)
    # shape_mixed is the Weingarten map in chart coordinates
    assert np.allclose(fd.shape_mixed, 0.5 * np.eye(3), atol=1e-9)


def test_flip_reverses_shape():
    patch = make_family(FamilySpec("geodesic-sphere", 1.0), H3)
    a = fundamental_forms(patch, patch.center).shape.entries
    b = fundamental_forms(patch.flipped(), patch.center).shape.entries
    assert np.allclose(a, -b, atol=1e-12)


@pytest.mark.parametrize("order,tol", [(2, 1e-4), (4, 1e-7), (6, 1e-8)])
def test_orders(order, tol):
    patch = make_family(FamilySpec("geodesic-sphere", 0.8), H3)
    lam = np.linalg.eigvalsh(fundamental_forms(patch, patch.center, h=2e-3, order=order).shape.entries)
    assert np.max(np.abs(lam - 1 / math.tanh(0.8))) < tol


@pytest.mark.parametrize("kind,R,model", [("geodesic-sphere", 0.8, H3), ("euclidean-sphere", 2.0, E3)])
def test_step_halving_second_order(kind, R, model):
    patch = make_family(FamilySpec(kind, R), model)
    u = patch.center + 0.05
    coarse = fundamental_forms(patch, u, h=4e-2, order=2).shape.entries
    mid = fundamental_forms(patch, u, h=2e-2, order=2).shape.entries
    fine = fundamental_forms(patch, u, h=1e-2, order=2).shape.entries
    ratio = np.abs(coarse - mid).max() / np.abs(mid - fine).max()
    assert 3.5 <= ratio <= 4.5


def test_sl_of_equidistant():
    patch = make_family(FamilySpec("equidistant", 1.0), H3)
    assert abs(sl_of_patch(patch, patch.center, 2.0) - 3 * math.atan(2 * math.tanh(1.0))) < 1e-8


def test_errors():
    patch = make_family(FamilySpec("equidistant", 1.0), H3)
    with pytest.raises(DomainError):
        fundamental_forms(patch, np.array([0.5, 0.0, 0.0]))
    with pytest.raises(InvalidInputError):
        fundamental_forms(patch, patch.center, order=3)
    with pytest.raises(InvalidInputError):
        FamilySpec("cylinder", 1.0)
    with pytest.raises(InvalidInputError):
        FamilySpec("equidistant", -1.0)
    with pytest.raises(DomainError):
        make_family(FamilySpec("equidistant", 1.0), E3)
    flat = ImmersionPatch(E3, -np.ones(3), np.ones(3), lambda u: np.array([u[0], u[0], u[2], 0.0]))
    with pytest.raises(ImmersionDegeneracyError):
        fundamental_forms(flat, np.zeros(3))


def test_descriptor_aliases():
    p = patch_from_descriptor({"model": {"type": "hyperbolic", "dim": 4}, "family": {"kind": "sphere", "R": 1.0}})
    assert p.name.startswith("geodesic-sphere")
    t = patch_from_descriptor({"model": {"type": "hyperbolic", "dim": 4}, "family": {"kind": "tube", "R": 0.5},
                               "orientation": -1})
    assert t.orientation == -1
    with pytest.raises(InvalidInputError):
        patch_from_descriptor({"family": {}})


def test_perturbed_family_epsilon_zero_matches_base():
    pert = MetricPerturbation(H3, 0.0, Bump("gaussian", (0.0, 0.0, 0.0, 0.0), 1.0))
    patch = make_family(FamilySpec("geodesic-sphere", 0.6), pert)
    lam = np.linalg.eigvalsh(fundamental_forms(patch, patch.center).shape.entries)
    assert np.max(np.abs(np.abs(lam) - 1 / math.tanh(0.6))) < 1e-6


@given(st.floats(-0.8, 0.8), st.floats(-0.8, 0.8), st.floats(-0.8, 0.8))
def test_graph_patch_quadratic(a, b, c):
    quad = np.array([[a, b], [b, c]])
    patch = graph_patch(SpaceForm(3, 0.0), np.zeros(3), quad)
    fd = fundamental_forms(patch, np.zeros(2))
    # upward normal: the graph bends away from it where quad is positive
    assert np.max(np.abs(fd.second_form + quad)) < 1e-8

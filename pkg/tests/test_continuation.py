import math

import numpy as np
import pytest

from slcurv.ambient import Bump, MetricPerturbation, SpaceForm
from slcurv.continuation import (
    ReducedProblem,
    graph_patch_in_perturbation,
    newton_continuation,
    reduced_curvatures,
    reduced_lemma_matrix,
)
from slcurv.errors import DomainError, NewtonDivergenceError
from slcurv.hypersurface import fundamental_forms
from slcurv.curvature import sl_value

H3 = SpaceForm(4, -1.0)
SLAB = Bump("slab", (0.0,), 0.7, 1)


def test_unperturbed_equidistant_curvatures():
    a = np.linspace(-1, 1, 5)
    km, kf = reduced_curvatures(a, 0.5 * np.ones(5), np.zeros(5), np.zeros(5), 0.0, SLAB)
    assert np.allclose(km, math.tanh(0.5), atol=1e-15)
    assert np.allclose(kf, math.tanh(0.5), atol=1e-15)


def test_zero_residual_at_start():
    prob = ReducedProblem(3, 1.0, 0.5, SLAB)
    assert np.max(np.abs(prob.residual(np.zeros(199), 0.0))) < 1e-15
    assert abs(prob.theta - 3 * math.atan(math.tanh(0.5))) < 1e-15


def test_jacobian_matches_lemma_matrix():
    prob = ReducedProblem(3, 1.0, 0.5, SLAB)
    jac = prob.jacobian(np.zeros(199), 0.0)
    assert np.max(np.abs(jac - reduced_lemma_matrix(prob))) < 1e-10


def test_jacobian_against_differences(rng):
    prob = ReducedProblem(3, 1.0, 0.5, SLAB, grid_size=41)
    f = 0.01 * rng.normal(size=39)
    jac = prob.jacobian(f, 0.02)
    h = 1e-6
    for j in (0, 10, 38):
        e = np.zeros(39)
        e[j] = h
        col = (prob.residual(f + e, 0.02) - prob.residual(f - e, 0.02)) / (2 * h)
        assert np.max(np.abs(col - jac[:, j])) < 1e-6 * (1 + np.abs(col).max())


def test_continuation_path_and_round_trip():
    pert = MetricPerturbation(H3, 0.0, SLAB)
    path = np.linspace(0.0, 0.01, 6)[1:]
    fwd = newton_continuation(0.5, pert, path)
    assert all(r["newton_iters"] <= 5 and r["residual"] <= 1e-8 for r in fwd.records)
    assert fwd.records[-1]["f_norm"] > 1e-5
    back = newton_continuation(0.5, pert, [0.008, 0.006, 0.004, 0.002, 0.0], f0=fwd.profiles[-1][1:-1])
    assert back.records[-1]["f_norm"] <= 1e-6


def test_reduced_solution_has_constant_sl_as_hypersurface():
    pert = MetricPerturbation(H3, 0.0, SLAB)
    res = newton_continuation(0.5, pert, [0.05])
    prob = res.problem
    patch = graph_patch_in_perturbation(prob, res.profiles[-1], 0.05, 0.3)
    fd = fundamental_forms(patch, np.zeros(3))
    assert abs(abs(sl_value(fd.shape, 1.0)) - prob.theta) < 1e-4


def test_errors():
    with pytest.raises(DomainError):
        ReducedProblem(3, 1.0, 0.5, Bump("gaussian"))
    with pytest.raises(DomainError):
        newton_continuation(0.5, MetricPerturbation(SpaceForm(4, 0.0), 0.0, SLAB), [0.01])
    with pytest.raises(NewtonDivergenceError):
        newton_continuation(0.5, MetricPerturbation(H3, 0.0, SLAB), [5.0], max_iter=2)

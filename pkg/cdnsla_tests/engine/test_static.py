"""Tests the two-stage static routing policy."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import pytest

import numpy as np
import numpy.testing as npt

from cdnsla.engine.geometry import AreaDecomposition, ServerLayout, decompose, sample_points
from cdnsla.engine.queueing import BirthDeathChain, throughput
from cdnsla.engine.static import *
from cdnsla_tests.common import lens, single_server


NPOINT = 200000


def brute_force(phi, common, mu, step=1.0e-3):
    """Best stage 1 and stage 2 objectives of two servers and one common region, on a grid."""

    g = np.arange(0.0, 1.0 + 0.5 * step, step)
    p0, p1 = np.meshgrid(g, g, indexing="ij")
    ok = p0 + p1 <= 1.0 + 1.0e-12
    lam0 = phi[0] + p0[ok] * common
    lam1 = phi[1] + p1[ok] * common
    gamma = np.minimum(lam0, mu[0]) + np.minimum(lam1, mu[1])
    best = gamma.max()
    u0, u1 = lam0 / mu[0], lam1 / mu[1]
    var = 0.25 * (u0 - u1) ** 2
    return best, var[gamma >= best - 1.0e-9].min()


stage_prms = [
    # exclusive rates, common rate, service rates
    ((0.5, 0.2), 0.6, (0.8, 0.6)),
    ((0.9, 0.1), 0.4, (1.0, 1.0)),
    ((0.3, 0.3), 1.0, (0.5, 0.5)),
    ((1.5, 0.0), 0.5, (1.0, 2.0)),
    ((0.0, 0.0), 2.0, (0.7, 0.4)),
]


@pytest.fixture(params=stage_prms)
def instance(request):
    phi, common, mu = request.param
    decomp = AreaDecomposition(2, {1: phi[0], 2: phi[1], 3: common}, 1.0)
    return decomp, np.array(mu), phi, common


def test_against_brute_force(instance):
    decomp, mu, phi, common = instance
    gamma, plan = solve(decomp, mu)
    best, var = brute_force(phi, common, mu)
    assert abs(gamma - best) <= 1.0e-3 * common + 1.0e-9
    assert gamma >= best - 1.0e-9
    assert plan.variance_objective <= var + 1.0e-6
    assert not plan.flagged


def test_gamma_is_served_rate(instance):
    """gamma equals sum_i min(lambda_i(0), mu_i) for both stages."""

    decomp, mu, phi, common = instance
    gamma, start = solve_stage1(decomp, mu)
    npt.assert_allclose(np.sum(np.minimum(start.server_rates, mu)), gamma, rtol=1.0e-8)
    npt.assert_allclose(start.objective, gamma, rtol=1.0e-8)
    plan = solve_stage2(decomp, mu, gamma, start)
    npt.assert_allclose(np.sum(np.minimum(plan.server_rates, mu)), gamma, rtol=1.0e-7)
    assert plan.variance_objective <= start.variance_objective + 1.0e-12
    assert all(0.0 <= p <= 1.0 for p in plan.split_fractions.values())
    assert plan.fraction(0, 3) + plan.fraction(1, 3) <= 1.0 + 1.0e-9


def test_balanced_split():
    decomp = AreaDecomposition(2, {1: 0.5, 2: 0.2, 3: 0.6}, 1.0)
    gamma, plan = solve(decomp, [0.8, 0.6])
    npt.assert_allclose(gamma, 1.3)
    npt.assert_allclose(plan.fraction(0, 3), 0.34 / 0.84, atol=1.0e-5)
    npt.assert_allclose(plan.fraction(1, 3), 0.5 / 0.84, atol=1.0e-5)
    assert plan.variance_objective < 1.0e-9


def test_unbalanced_split():
    """Equal loads are out of reach, the common region all goes to the lighter server."""

    decomp = AreaDecomposition(2, {1: 0.9, 2: 0.1, 3: 0.4}, 1.0)
    gamma, plan = solve(decomp, [1.0, 1.0])
    npt.assert_allclose(gamma, 1.4)
    npt.assert_allclose([plan.fraction(0, 3), plan.fraction(1, 3)], [0.0, 1.0], atol=1.0e-6)
    npt.assert_allclose(plan.server_rates, [0.9, 0.5], atol=1.0e-6)
    npt.assert_allclose(plan.variance_objective, 0.04, atol=1.0e-6)


def test_ties_take_smallest_fractions():
    """Zero imbalance holds on a whole segment of plans; the smallest one wins."""

    decomp = AreaDecomposition(2, {3: 2.0}, 1.0)
    gamma, plan = solve(decomp, [0.7, 0.4])
    npt.assert_allclose(gamma, 1.1)
    assert plan.variance_objective < 1.0e-9
    npt.assert_allclose([plan.fraction(0, 3), plan.fraction(1, 3)], [0.35, 0.2], atol=1.0e-5)
    assert not plan.flagged


@pytest.mark.parametrize("areal", [0.2, 1.0])
def test_symmetric_lens(areal):
    gamma, plan = solve(decompose(lens(areal=areal)), [1.0, 1.0])
    assert plan.variance_objective < 1.0e-10
    npt.assert_allclose(plan.server_rates[0], plan.server_rates[1], rtol=1.0e-4)
    if areal == 1.0:
        npt.assert_allclose(gamma, 2.0)
    else:
        npt.assert_allclose(gamma, 0.2 * decompose(lens()).union_area)


def test_three_servers():
    pos = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.8]]
    layout = ServerLayout(pos, [0.6, 1.0, 1.5], 2.0, (-3.0, -3.0, 4.0, 4.0), 0.3)
    decomp = decompose(layout)
    gamma, plan = solve(decomp, layout.service_rates)
    npt.assert_allclose(np.sum(np.minimum(plan.server_rates, layout.service_rates)), gamma, rtol=1.0e-7)
    assert gamma <= min(decomp.total_covered_rate, np.sum(layout.service_rates)) + 1.0e-9
    for z, phi in plan.regions:
        assert sum(plan.fraction(i, z) for i in range(3)) <= 1.0 + 1.0e-9


def test_plan_round_trip():
    decomp = AreaDecomposition(2, {1: 0.5, 2: 0.2, 3: 0.6}, 1.0)
    gamma, plan = solve(decomp, [0.8, 0.6])
    back = AssignmentPlan.from_dict(plan.to_dict())
    npt.assert_allclose(back.server_rates, plan.server_rates)
    assert back.regions == plan.regions


def test_invalid_problems():
    decomp = AreaDecomposition(2, {1: 0.5, 3: 0.6}, 1.0)
    with pytest.raises(ValueError):
        solve(decomp, [1.0])
    with pytest.raises(ValueError):
        solve(decomp, [1.0, 0.0])


def test_admit_fractions():
    npt.assert_allclose(admit_fractions([2.0, 0.5, 0.0], [1.0, 1.0, 1.0]), [0.5, 1.0, 1.0])


def test_load_variance():
    npt.assert_allclose(load_variance([1.0, 3.0, 2.0], [1.0, 1.0, 2.0], [3, 7]), 1.0 + 8.0 / 9.0)


def test_materialized_rates():
    """The cuts realise the planned rates on the point set they were measured on."""

    layout = lens(areal=0.3)
    decomp = decompose(layout, mode="montecarlo", seed=4, nsamples=NPOINT)
    gamma, plan = solve(decomp, layout.service_rates)
    assignment = materialize(plan, decomp, layout, seed=4, nsamples=NPOINT)
    points = sample_points(layout.region, NPOINT, 4)
    cell = points.area / points.npoint
    rates = assignment.assigned_rates(points, layout.areal_rate)
    npt.assert_allclose(rates, plan.server_rates, atol=3.0 * cell * layout.areal_rate)


def test_leftover_goes_to_origin():
    layout = lens()
    decomp = decompose(layout)
    phi = decomp.rate(3)
    plan = AssignmentPlan(layout.service_rates, decomp.exclusive_rates, [(3, phi)], {(0, 3): 0.3, (1, 3): 0.3})
    assignment = materialize(plan, decomp, layout, seed=2, nsamples=NPOINT)
    points = sample_points(layout.region, NPOINT, 2)
    owner = assignment.server_for(points)
    inlens = ((np.linalg.norm(points.points - [0.5, 0.0], axis=1) <= 1.0) &
              (np.linalg.norm(points.points + [0.5, 0.0], axis=1) <= 1.0))
    npt.assert_allclose(np.sum(owner[inlens] == -1), 0.4 * np.sum(inlens), rtol=0.01)
    npt.assert_array_equal(assignment.server_for([[-1.2, 0.0], [1.2, 0.0], [3.5, 3.5]]), [0, 1, -1])


def test_single_server_throughput():
    """With one server the static policy is the birth-death chain itself."""

    layout = single_server(0.8, psi=20.0)
    gamma, plan = solve(decompose(layout), layout.service_rates)
    npt.assert_allclose(gamma, 0.8)
    assignment = materialize(plan, decompose(layout), layout, seed=1, nsamples=NPOINT)
    total, per = analytic_throughput(layout, assignment, plan, seed=1, nsamples=NPOINT)
    expected = throughput(BirthDeathChain.from_empty_rate(1.0, 20.0, 0.8))
    npt.assert_allclose(total, expected, rtol=5.0e-3)
    npt.assert_allclose(per, [total])


def test_throughput_below_gamma():
    layout = lens(areal=0.5, psi=4.0, half=5.0)
    decomp = decompose(layout)
    gamma, plan = solve(decomp, layout.service_rates)
    assignment = materialize(plan, decomp, layout, seed=0, nsamples=NPOINT)
    total, per = analytic_throughput(layout, assignment, plan, seed=0, nsamples=NPOINT)
    assert 0.0 < total <= gamma * 1.01
    assert np.all(per <= layout.service_rates)

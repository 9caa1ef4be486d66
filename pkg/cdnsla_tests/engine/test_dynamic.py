"""Tests the optimal dynamic routing policy."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import pytest

import numpy as np
import numpy.testing as npt

from cdnsla.engine.geometry import decompose
from cdnsla.engine.queueing import BirthDeathChain, throughput
from cdnsla.engine.static import solve as solve_static, materialize, analytic_throughput
from cdnsla.engine.dynamic import *
from cdnsla.engine.dynamic import _choices
from cdnsla.utils.mathtools import span
from cdnsla_tests.common import lens, single_server


NPOINT = 100000


def small_lens(**kwargs):
    """Two servers with three queue lengths each."""

    args = {"psi": 3.0, "areal": 0.3}
    args.update(kwargs)
    return lens(**args)


@pytest.mark.parametrize("lambda0", [0.8, 1.0, 1.3])
def test_single_server_matches_chain(lambda0):
    mdp = build_mdp(single_server(lambda0, psi=30.0))
    assert mdp.nstate == 30
    sol = solve(mdp, tol=1.0e-10)
    assert sol.converged
    expected = throughput(BirthDeathChain.from_empty_rate(1.0, 30.0, lambda0))
    assert abs(sol.gain_rate - expected) < 1.0e-6
    assert abs(evaluate_policy(mdp, policy_lowest_index(mdp)) - expected) < 1.0e-6


def test_busy_reward():
    """With one server the busy fraction is the throughput over mu."""

    layout = single_server(0.8, mu=2.0, psi=15.0)
    sol = solve(build_mdp(layout, reward="busy"), tol=1.0e-10)
    expected = throughput(BirthDeathChain.from_empty_rate(2.0, 15.0, 0.8)) / 2.0
    assert abs(sol.gain_rate - expected) < 1.0e-6


def test_bellman_residual():
    mdp = build_mdp(small_lens())
    sol = solve(mdp, tol=1.0e-10)
    assert sol.value((0, 0)) == 0.0
    th = bellman_update(mdp, sol.values)
    assert span(th - sol.values) < 1.0e-9
    assert abs(th[0] - sol.gain) < 1.0e-9
    assert sol.residual < 1.0e-10


def test_optimal_policy_evaluation():
    mdp = build_mdp(small_lens())
    sol = solve(mdp, tol=1.0e-10)
    g, h = evaluate_policy(mdp, policy_from_solution(sol), values=True)
    assert abs(g - sol.gain_rate) < 1.0e-7
    assert h[0] == 0.0
    # within the accuracy of value iteration, the two can coincide
    assert evaluate_policy(mdp, policy_lowest_index(mdp)) <= sol.gain_rate + 1.0e-7


def test_origin_never_helps():
    layout = small_lens(areal=1.0)
    plain = solve(build_mdp(layout), tol=1.0e-10)
    redirect = solve(build_mdp(layout, allow_origin=True), tol=1.0e-10)
    assert redirect.gain_rate <= plain.gain_rate + 1.0e-8
    origin_all = policy_from_regions(redirect.mdp, lambda z: -1, "origin")
    assert abs(evaluate_policy(redirect.mdp, origin_all)) < 1.0e-12


def test_symmetric_routing():
    sol = solve(build_mdp(small_lens()), tol=1.0e-10)
    assert sol.route((0, 0), 0) == -1
    assert sol.route((0, 0), 1) == 0
    assert sol.route((0, 0), 2) == 1
    # ties go to the lower index
    assert sol.route((0, 0), 3) == 0
    assert sol.route((1, 0), 3) == 1 - sol.route((0, 1), 3)
    assert abs(sol.value((1, 0)) - sol.value((0, 1))) < 1.0e-8

@pytest.mark.parametrize("shift", [-7.5, 1.0e-3, 250.0])
def test_shifted_values_same_policy(shift):
    """Adding a constant to the relative values changes neither the policy
    nor the Bellman update beyond the same constant."""

    for mdp in (build_mdp(small_lens()), build_mdp(small_lens(areal=1.0), allow_origin=True)):
        sol = solve(mdp, tol=1.0e-10)
        best, value = _choices(mdp, sol.values)
        moved, moved_value = _choices(mdp, sol.values + shift)
        npt.assert_array_equal(moved, best)
        npt.assert_array_equal(moved, sol.policy)
        npt.assert_allclose(moved_value, value + shift, rtol=0.0, atol=1.0e-9 * (1.0 + abs(shift)))
        npt.assert_allclose(bellman_update(mdp, sol.values + shift), bellman_update(mdp, sol.values) + shift,
                            rtol=0.0, atol=1.0e-9 * (1.0 + abs(shift)))


def test_tangent_disks_keep_symmetry():
    """States whose disks touch from inside are mirror images of each other."""

    mdp = build_mdp(small_lens())
    r = mdp.region_rates
    npt.assert_allclose(r[mdp.index((1, 0))][[1, 2, 3]], r[mdp.index((0, 1))][[2, 1, 3]], rtol=1.0e-12, atol=1.0e-12)
    assert r[mdp.index((1, 0))][1] < 1.0e-12



def test_dynamic_beats_static():
    layout = small_lens(areal=0.5, psi=4.0, half=5.0)
    mdp = build_mdp(layout, "montecarlo", seed=0, nsamples=NPOINT)
    sol = solve(mdp, tol=1.0e-10)
    decomp = decompose(layout, mode="montecarlo", seed=0, nsamples=NPOINT)
    gamma, plan = solve_static(decomp, layout.service_rates)
    assignment = materialize(plan, decomp, layout, seed=0, nsamples=NPOINT)
    static_gain = evaluate_policy(mdp, policy_from_static(mdp, assignment, seed=0, nsamples=NPOINT))
    assert static_gain <= sol.gain_rate * (1.0 + 1.0e-6)
    total, per = analytic_throughput(layout, assignment, plan, seed=0, nsamples=NPOINT)
    npt.assert_allclose(static_gain, total, rtol=1.0e-8)


def test_montecarlo_geometry():
    layout = small_lens()
    exact = solve(build_mdp(layout), tol=1.0e-10).gain_rate
    mc = build_mdp(layout, "montecarlo", seed=1, nsamples=NPOINT)
    assert mc.mode == "montecarlo"
    npt.assert_allclose(solve(mc, tol=1.0e-10).gain_rate, exact, rtol=1.0e-2)


def test_state_cap():
    with pytest.raises(ValueError):
        build_mdp(small_lens(), cap=8)
    build_mdp(small_lens(), cap=9)


def test_invalid_policies():
    mdp = build_mdp(small_lens())
    rates = policy_lowest_index(mdp).rates
    bad = rates.copy()
    bad[4, 0] = np.nan
    with pytest.raises(ValueError):
        evaluate_policy(mdp, RoutingPolicy(bad))
    with pytest.raises(ValueError):
        evaluate_policy(mdp, RoutingPolicy(2.0 * rates + 1.0))
    with pytest.raises(ValueError):
        evaluate_policy(mdp, RoutingPolicy(rates[:, :1]))
    with pytest.raises(ValueError):
        policy_from_regions(mdp, lambda z: 1 if z == 1 else -1)
    with pytest.raises(ValueError):
        build_mdp(small_lens(), reward="latency")


def test_no_convergence():
    sol = solve(build_mdp(small_lens()), tol=1.0e-14, max_iter=3)
    assert not sol.converged
    assert sol.iterations == 3


def test_solution_dict():
    sol = solve(build_mdp(small_lens()), tol=1.0e-10)
    d = sol.to_dict()
    assert d["converged"]
    npt.assert_allclose(d["gain_rate"], sol.gain_rate)
    assert len(d["policy"]) > 0
    for e in d["policy"]:
        assert e["mask"] == 3
        assert e["server"] in (0, 1)
        assert sol.route(e["state"], 3) == e["server"]

"""Tests the discrete-event simulator and policy comparisons."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import io

import pytest

import numpy as np
import numpy.testing as npt

from cdnsla.engine.geometry import decompose
from cdnsla.engine.queueing import BirthDeathChain, throughput
from cdnsla.engine import static, dynamic
from cdnsla.engine.simulation import *
from cdnsla_tests.common import lens, single_server


def small_lens(**kwargs):
    args = {"psi": 3.0, "areal": 0.3, "half": 3.0}
    args.update(kwargs)
    return lens(**args)


def static_assignment(layout, nsamples=50000):
    decomp = decompose(layout)
    gamma, plan = static.solve(decomp, layout.service_rates)
    return static.materialize(plan, decomp, layout, seed=0, nsamples=nsamples)


class FirstServer(object):

    """A routing table that always answers server 0."""

    def route(self, state, mask):
        return 0


@pytest.fixture(params=["greedy", "random", "exclusive", "static"])
def config(request):
    layout = small_lens()
    assignment = static_assignment(layout) if request.param == "static" else None
    return SimConfig(layout, request.param, horizon=500.0, seed=7, assignment=assignment)


def test_conservation(config):
    report = run(config)
    assert report.arrivals > 0
    assert report.arrivals == report.served_within_psi + report.origin_served
    assert report.served_within_psi == sum(report.per_server_served)
    assert report.strict_within_psi <= report.served_within_psi
    assert np.all(np.array(report.max_queue) <= config.layout.queue_bounds)
    assert np.all(np.array(report.utilizations) <= 1.0)
    npt.assert_allclose(report.throughput_rate, report.served_within_psi / report.duration)
    npt.assert_allclose(np.mean(report.batch_throughputs), report.throughput_rate)


def test_unit_price_revenue(config):
    report = run(config)
    assert report.revenue_rate == report.throughput_rate
    npt.assert_allclose(report.batch_revenues, report.batch_throughputs)


def test_penalty():
    config = SimConfig(small_lens(), "greedy", horizon=500.0, seed=3, price=2.0, penalty=0.5)
    report = run(config)
    npt.assert_allclose(report.revenue_rate,
                        (2.0 * report.served_within_psi - 0.5 * report.origin_served) / report.duration)


def test_determinism(config):
    a = run(config).to_dict()
    b = run(config).to_dict()
    assert a == b
    c = run(config.with_layout(config.layout, seed=8)).to_dict()
    assert c["arrivals"] != a["arrivals"] or c["batch_throughputs"] != a["batch_throughputs"]


def test_no_requests():
    layout = small_lens(areal=0.0)
    report = run(SimConfig(layout, "greedy", horizon=100.0))
    assert report.arrivals == 0
    assert report.throughput_rate == 0.0
    assert report.revenue_rate == 0.0
    npt.assert_array_equal(report.utilizations, [0.0, 0.0])
    npt.assert_array_equal(report.batch_throughputs, np.zeros(20))


def test_exclusive_policy():
    """Requests of the common area all go to the origin."""

    layout = small_lens(areal=2.0)
    greedy = run(SimConfig(layout, "greedy", horizon=200.0, seed=1))
    exclusive = run(SimConfig(layout, "exclusive", horizon=200.0, seed=1))
    assert exclusive.arrivals == greedy.arrivals
    assert exclusive.origin_served > greedy.origin_served


def test_single_server_policies_agree():
    """With one server every policy is the same, and common random numbers make runs identical."""

    layout = single_server(0.8, psi=10.0)
    configs = [SimConfig(layout, p, horizon=2000.0, seed=11) for p in ("greedy", "random", "exclusive")]
    table = compare_policies(configs)
    for row in table.rows:
        assert row["throughput_difference"] == 0.0
        assert row["revenue_difference"] == 0.0
        assert row["throughput_rate"] == table.rows[0]["throughput_rate"]


def test_compare_policies():
    layout = small_lens(areal=1.0)
    configs = [SimConfig(layout, "static", horizon=500.0, assignment=static_assignment(layout)),
               SimConfig(layout, "greedy", horizon=500.0),
               SimConfig(layout, "exclusive", horizon=500.0)]
    table = compare_policies(configs)
    assert [r["policy"] for r in table.rows] == ["static", "greedy", "exclusive"]
    assert table.rows[0]["throughput_difference"] == 0.0
    assert table.rows[0]["throughput_difference_half_width"] == 0.0
    assert sorted(table.ranking()) == ["exclusive", "greedy", "static"]
    rates = [r["throughput_rate"] for r in table.rows]
    assert table.ranking()[0] == table.rows[int(np.argmax(rates))]["policy"]

    with pytest.raises(ValueError):
        compare_policies([configs[0], SimConfig(layout, "greedy", horizon=500.0, seed=1)])
    with pytest.raises(ValueError):
        compare_policies([configs[1], SimConfig(small_lens(areal=2.0), "greedy", horizon=500.0)])
    with pytest.raises(ValueError):
        compare_policies([])


def test_dp_policy():
    layout = small_lens()
    sol = dynamic.solve(dynamic.build_mdp(layout), tol=1.0e-10)
    report = run(SimConfig(layout, "dp", horizon=4000.0, seed=5, solution=sol))
    assert report.arrivals == report.served_within_psi + report.origin_served
    npt.assert_allclose(report.throughput_rate, sol.gain_rate, rtol=0.1)


def test_infeasible_route():
    with pytest.raises(SimulationError):
        run(SimConfig(small_lens(), "dp", horizon=100.0, solution=FirstServer()))


def test_trace():
    trace = io.StringIO()
    run(SimConfig(small_lens(), "greedy", horizon=20.0, warmup=0.0, seed=2, trace=trace))
    lines = trace.getvalue().splitlines()
    assert len(lines) > 0
    t, kind, server, q0, q1 = lines[0].split()
    assert kind == "arrival"
    times = [float(l.split()[0]) for l in lines]
    assert times == sorted(times)


def test_invalid_configs():
    layout = small_lens()
    with pytest.raises(ValueError):
        SimConfig(layout, "fastest")
    with pytest.raises(ValueError):
        SimConfig(layout, "static")
    with pytest.raises(ValueError):
        SimConfig(layout, "dp")
    with pytest.raises(ValueError):
        SimConfig(layout, horizon=10.0, warmup=10.0)
    with pytest.raises(ValueError):
        SimConfig(layout, nbatch=1)
    with pytest.raises(ValueError):
        SimConfig(layout, penalty=-1.0)


def test_default_warmup():
    layout = small_lens()
    assert SimConfig(layout, horizon=1.0e4).warmup == 20.0
    assert SimConfig(layout, horizon=100.0).warmup == 10.0


def test_report_round_trip():
    report = run(SimConfig(small_lens(), "greedy", horizon=100.0))
    back = SimReport.from_dict(report.to_dict())
    assert back.to_dict() == report.to_dict()
    assert len(report.row()) == 12
    assert "batch_throughputs" not in report.row()


def test_scaling_experiment():
    base = SimConfig(small_lens(areal=0.1, half=4.0), "greedy", horizon=300.0, seed=4)
    report = scaling_experiment(base, [1, 2])
    assert [r[0] for r in report.rows] == [1, 2]
    for c, j, bound, ratio in report.rows:
        npt.assert_allclose(ratio, j / bound)
    with pytest.raises(ValueError):
        scaling_experiment(base, [0.5])
    sol = dynamic.solve(dynamic.build_mdp(small_lens()))
    with pytest.raises(ValueError):
        scaling_experiment(SimConfig(small_lens(), "dp", solution=sol), [1])


@pytest.mark.slow
def test_single_server_matches_chain():
    layout = single_server(0.8, psi=30.0)
    report = run(SimConfig(layout, "greedy", horizon=1.0e5, seed=21))
    expected = throughput(BirthDeathChain.from_empty_rate(1.0, 30.0, 0.8))
    npt.assert_allclose(report.throughput_rate, expected, rtol=0.02)
    assert abs(report.throughput_rate - expected) < 3.0 * report.throughput_half_width + 0.01 * expected


@pytest.mark.slow
def test_static_scaling():
    layout = small_lens(areal=0.1, half=4.0)
    base = SimConfig(layout, "static", horizon=2000.0, seed=9,
                     assignment=static_assignment(layout))
    report = scaling_experiment(base, [1, 4], nsamples=50000, scale_horizon=True)
    assert report.ratios[1] > report.ratios[0] - 0.05
    assert np.all(report.ratios < 1.05)


@pytest.mark.slow
def test_static_policy_approaches_bound():
    layout = lens(psi=2.0, areal=0.02, half=3.0)
    base = SimConfig(layout, "static", horizon=1.0e4, seed=13, assignment=static_assignment(layout))
    report = scaling_experiment(base, [10, 100])
    assert report.ratios[0] >= 0.95
    assert report.ratios[1] >= 0.99
    assert np.all(report.ratios < 1.01)


@pytest.mark.slow
def test_long_run_matches_chain():
    layout = single_server(1.05, psi=1000.0)
    report = run(SimConfig(layout, "greedy", horizon=1.0e6, seed=3))
    expected = throughput(BirthDeathChain.from_empty_rate(1.0, 1000.0, 1.05))
    npt.assert_allclose(expected, 0.988756, atol=1.0e-5)
    assert abs(report.throughput_rate - expected) < 3.0 * report.throughput_half_width
    assert abs(report.throughput_rate - expected) < 0.02

"""Tests that configuration sections build the right engine objects."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import pytest

import numpy.testing as npt

from cdnsla.utils.inputvalue import ConfigError
from cdnsla.utils.io.inputs.io_xml import json_to_node
from cdnsla.inputs.market import InputMarket
from cdnsla.inputs.chain import InputChain
from cdnsla.inputs.layout import InputLayout
from cdnsla.inputs.simulation import InputRun, InputMdp, InputScaling
from cdnsla.inputs.commands import CONFIGS
from cdnsla.engine.geometry import ServerLayout
from cdnsla_tests.common import lens


def fetched(cls, doc):
    section = cls()
    section.parse(json_to_node(doc, "section"))
    return section.fetch()


def test_market_sorted():
    market = fetched(InputMarket, {"betas": [0.5, 0.25], "population": 2.0})
    npt.assert_allclose(market.betas, [0.25, 0.5])
    assert market.population == 2.0


market_error_prms = [
    ({"betas": []}, "betas"),
    ({"betas": [0.2, 0.4], "prices": [0.1]}, "prices"),
    ({"betas": [0.2, 1.5]}, "betas"),
    ({"betas": [0.2, 0.4], "population": 0.0}, "population"),
]


@pytest.mark.parametrize("doc, path", market_error_prms)
def test_market_errors(doc, path):
    with pytest.raises(ConfigError) as e:
        fetched(InputMarket, doc)
    assert e.value.path == path


def test_chain_rates():
    chain = fetched(InputChain, {"mu": 1.0, "psi": 10.0, "empty_rate": 0.8})
    assert chain.n_max == 9
    with pytest.raises(ConfigError):
        fetched(InputChain, {"mu": 1.0, "psi": 10.0})
    with pytest.raises(ConfigError):
        fetched(InputChain, {"mu": 1.0, "psi": 10.0, "empty_rate": 0.8, "areal_rate": 0.1})


def test_layout_store():
    section = InputLayout()
    section.store(lens())
    layout = section.fetch()
    assert isinstance(layout, ServerLayout)
    npt.assert_array_equal(layout.positions, lens().positions)
    assert layout.region == lens().region


def test_run_settings():
    run = fetched(InputRun, {"policy": "greedy", "horizon": 100.0})
    assert run["warmup"] is None
    assert run["nbatch"] == 20
    with pytest.raises(ConfigError) as e:
        fetched(InputRun, {"horizon": 10.0, "warmup": 20.0})
    assert e.value.path == "warmup"
    with pytest.raises(ConfigError) as e:
        fetched(InputRun, {"policy": "fastest"})
    assert e.value.path == "policy"


def test_mdp_and_scaling():
    assert fetched(InputMdp, {"reward": "busy"})["reward"] == "busy"
    with pytest.raises(ConfigError) as e:
        fetched(InputMdp, {"tol": 0.0})
    assert e.value.path == "tol"
    assert fetched(InputScaling, {"factors": [1, 10]})["factors"] == [1.0, 10.0]
    with pytest.raises(ConfigError) as e:
        fetched(InputScaling, {"factors": [0.5]})
    assert e.value.path == "factors"


def test_commands():
    assert sorted(CONFIGS) == ["chain", "compare", "dp-solve", "equilibrium", "ratio-sweep",
                               "scaling", "simulate", "static-solve"]
    for name, cls in CONFIGS.items():
        assert cls.__doc__.strip() != ""

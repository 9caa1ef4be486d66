"""Tests the command line front end, its artifacts and its exit statuses."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import os
import csv
import json

import mock
import pytest

import numpy.testing as npt

from cdnsla.cli import *
from cdnsla.utils.messages import verbosity
from cdnsla_tests.common import local


@pytest.fixture(autouse=True)
def quiet_stream():
    yield
    verbosity.stream = None
    verbosity.level = "low"


def derived(tmp_path, base, drop=(), **changes):
    """Writes a copy of a configuration fixture with some sections changed."""

    with open(local("configs/" + base)) as f:
        doc = json.load(f)
    for k in drop:
        doc.pop(k)
    for k, v in changes.items():
        if isinstance(v, dict) and isinstance(doc.get(k), dict):
            doc[k].update(v)
        else:
            doc[k] = v
    path = tmp_path / ("derived_" + base)
    path.write_text(json.dumps(doc))
    return str(path)


def error_record(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    record = json.loads(err[-1])
    assert record["status"] == "error"
    return record


def test_duopoly_table_csv(tmp_path):
    out = str(tmp_path / "table.csv")
    assert main(["equilibrium", "--config", local("configs/duopoly.json"), "--out", out]) == EXIT_OK
    with open(out) as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0].keys()) == ["beta1", "beta2", "price1", "price2", "revenue1", "revenue2", "ratio"]
    npt.assert_allclose([float(r["ratio"]) for r in rows], [4.040816, 4.045455, 4.5], atol=1.0e-6)
    assert rows[2]["ratio"] == "4.500000"


def test_duopoly_table_json(capsys):
    assert main(["equilibrium", "--config", local("configs/duopoly.json")]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["rows"]) == 3
    assert len(doc["results"]) == 3
    npt.assert_allclose(doc["rows"][0]["ratio"], 4.040816, atol=1.0e-6)


def test_output_dir(tmp_path):
    with mock.patch.dict(os.environ, {OUTPUT_DIR_VARIABLE: str(tmp_path)}):
        assert main(["scaling", "--config", local("configs/scaling.xml"), "--out", "sub/scaling.csv"]) == EXIT_OK
    with open(str(tmp_path / "sub" / "scaling.csv")) as f:
        rows = list(csv.DictReader(f))
    assert [float(r["c"]) for r in rows] == [1.0, 2.0, 3.0]
    npt.assert_allclose(float(rows[1]["ratio"]), 0.995930, atol=1.0e-6)


def test_output_path():
    assert output_path("a.csv", {}) == "a.csv"
    assert output_path("a.csv", {OUTPUT_DIR_VARIABLE: "/data"}) == os.path.join("/data", "a.csv")
    assert output_path("/tmp/a.csv", {OUTPUT_DIR_VARIABLE: "/data"}) == "/tmp/a.csv"
    assert output_path("-", {OUTPUT_DIR_VARIABLE: "/data"}) == "-"


def test_chain(capsys):
    assert main(["chain", "--config", local("configs/chain.xml"), "--format", "json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["n_max"] == 999
    assert len(doc["rows"]) == 1000
    npt.assert_allclose(doc["throughput"], 0.988756, atol=2.0e-6)


def test_missing_config(tmp_path, capsys):
    path = str(tmp_path / "nowhere.json")
    assert main(["chain", "--config", path]) == EXIT_CONFIG
    record = error_record(capsys)
    assert record["kind"] == "config"
    assert record["path"] == path


def test_malformed_config(capsys):
    assert main(["equilibrium", "--config", local("configs/malformed.json")]) == EXIT_CONFIG
    assert error_record(capsys)["kind"] == "config"


def test_wrong_cdn_count(capsys):
    assert main(["equilibrium", "--config", local("configs/duopoly_bad.json")]) == EXIT_CONFIG
    record = error_record(capsys)
    assert record["path"] == "market[0].betas"


config_error_prms = [
    # changes to the lens document, path of the error
    ({"schema_version": 2}, "schema_version"),
    ({"layout": {"service_rates": [1.0, 0.0]}}, "layout.service_rates"),
    ({"layout": {"service_rates": [1.0]}}, "layout.service_rates"),
    ({"layout": {"positions": [0.0, 1.0]}}, "layout.positions"),
    ({"layout": {"psi": -1.0}}, "layout.psi"),
    ({"geometry": {"mode": "grid"}}, "geometry.mode"),
    ({"geometry": {"samples": 0}}, "geometry.samples"),
    ({"prng": {"seed": -3}}, "prng.seed"),
    ({"colour": "blue"}, "colour"),
]


@pytest.mark.parametrize("changes, path", config_error_prms)
def test_config_error_paths(tmp_path, capsys, changes, path):
    config = derived(tmp_path, "lens.json", **changes)
    assert main(["static-solve", "--config", config]) == EXIT_CONFIG
    record = error_record(capsys)
    assert record["kind"] == "config"
    assert record["path"] == path


def test_missing_layout(tmp_path, capsys):
    config = derived(tmp_path, "lens.json", drop=["layout"])
    assert main(["static-solve", "--config", config]) == EXIT_CONFIG
    assert error_record(capsys)["path"] == "layout"


def test_compute_error(capsys):
    assert main(["equilibrium", "--config", local("configs/four_cdns.json")]) == EXIT_COMPUTE
    record = error_record(capsys)
    assert record["kind"] == "ValueError"
    assert record["path"] == "equilibrium"


def test_linear_method(tmp_path, capsys):
    config = derived(tmp_path, "four_cdns.json", method="linear")
    assert main(["equilibrium", "--config", config]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["rows"]) == 4
    assert all(r["converged"] for r in doc["rows"])


def test_static_solve(capsys):
    assert main(["static-solve", "--config", local("configs/lens.json")]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert [r["server"] for r in doc["rows"]] == [0, 1]
    assert doc["analytic_throughput"] <= doc["gamma"] * 1.01
    npt.assert_allclose(doc["rows"][0]["server_rate"], doc["rows"][1]["server_rate"], rtol=1.0e-4)


def test_dp_solve(capsys):
    assert main(["dp-solve", "--config", local("configs/lens.json")]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["converged"]
    assert len(doc["rows"]) > 0


def test_simulate_deterministic(tmp_path):
    config = derived(tmp_path, "lens.json", run={"policy": "greedy", "horizon": 300.0})
    outs = [str(tmp_path / "a.json"), str(tmp_path / "b.json"), str(tmp_path / "c.json")]
    assert main(["simulate", "--config", config, "--out", outs[0]]) == EXIT_OK
    assert main(["simulate", "--config", config, "--out", outs[1]]) == EXIT_OK
    assert main(["simulate", "--config", config, "--out", outs[2], "--seed", "8"]) == EXIT_OK
    docs = [open(o).read() for o in outs]
    assert docs[0] == docs[1]
    assert json.loads(docs[0])["report"]["seed"] == 7
    assert json.loads(docs[2])["report"]["seed"] == 8


def test_simulate_trace(tmp_path):
    trace = str(tmp_path / "events.txt")
    config = derived(tmp_path, "lens.json", run={"policy": "static", "horizon": 50.0, "warmup": 0.0, "trace": trace})
    assert main(["simulate", "--config", config, "--out", str(tmp_path / "run.csv")]) == EXIT_OK
    with open(trace) as f:
        assert len(f.readlines()) > 0


def test_simulate_dp_scaling_rejected(tmp_path, capsys):
    config = derived(tmp_path, "lens.json", run={"policy": "dp"}, scaling={"factors": [1, 2]})
    assert main(["simulate", "--config", config]) == EXIT_CONFIG
    assert error_record(capsys)["path"] == "run.policy"


def test_compare(tmp_path, capsys):
    config = derived(tmp_path, "lens.json", run={"horizon": 300.0}, policies=["static", "greedy", "exclusive"])
    assert main(["compare", "--config", config]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert [r["policy"] for r in doc["rows"]] == ["static", "greedy", "exclusive"]
    assert sorted(doc["ranking"]) == ["exclusive", "greedy", "static"]

    config = derived(tmp_path, "lens.json", policies=["greedy", "fastest"])
    assert main(["compare", "--config", config]) == EXIT_CONFIG
    assert error_record(capsys)["path"] == "policies"


def test_ratio_sweep(tmp_path, capsys):
    config = tmp_path / "sweep.json"
    config.write_text(json.dumps({"schema_version": 1, "beta_fixed": 0.5, "beta_varying": [0.1, 0.3, 0.5]}))
    assert main(["ratio-sweep", "--config", str(config)]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["rows"]) == 2
    assert doc["skipped"] == [[0.5, 0.5]]


def test_command():
    assert Command("chain", "x.json", out="y.csv").format == "csv"
    assert Command("chain", "x.json").format == "json"
    with pytest.raises(ValueError):
        Command("fly", "x.json")
    with pytest.raises(ValueError):
        Command("chain", "x.json", format="xml")
    with pytest.raises(SystemExit):
        build_parser().parse_args(["chain"])


def test_chain_rejects_scaling(capsys):
    assert main(["chain", "--config", local("configs/scaling.xml")]) == EXIT_CONFIG
    assert error_record(capsys)["path"] == "scaling"


def test_loading_failure_reported(capsys):
    with mock.patch("cdnsla.cli.load_settings", side_effect=NameError("boom")):
        assert main(["chain", "--config", local("configs/chain.xml")]) == EXIT_COMPUTE
    record = error_record(capsys)
    assert record["kind"] == "NameError"
    assert record["path"] == "chain"


def test_triopoly_table(tmp_path, capsys):
    config = tmp_path / "triopoly.json"
    config.write_text(json.dumps({"schema_version": 1, "table": "triopoly",
                                  "market": [{"betas": [0.01, 0.02, 0.03]}, {"betas": [0.2, 0.5, 0.8]}]}))
    assert main(["equilibrium", "--config", str(config)]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    row = doc["rows"][0]
    npt.assert_allclose([row["ratio12"], row["ratio23"], row["ratio13"]], [4.924346, 988.082474, 4865.659794], rtol=1.0e-4)
    assert row["split_ratio23"] < row["ratio23"]
    assert all(r["nash"] for r in doc["rows"])
    assert all(r["nash"] for r in doc["results"])

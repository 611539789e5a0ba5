import csv
import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from warpband import RunConfig, run_config
from warpband.cli import main
from warpband.config import Command, ConfigError, dumps, format_float, load_config
from warpband.convergence import convergence_order


# ---------------------------------------------------------------- convergence

def test_order_geometric_data():
    rec = convergence_order([0.1, 0.05, 0.025], [1e-2, 2.5e-3, 6.25e-4])
    assert rec.fitted_order == pytest.approx(2.0, abs=1e-12)


def test_order_exact_sentinel():
    rec = convergence_order([0.1, 0.05, 0.025], [1e-15, 0.0, 3e-16])
    assert rec.exact and rec.order_label() == "exact"
    assert rec.to_dict()["fitted_order"] == "exact"


def test_order_needs_three_levels():
    with pytest.raises(ValueError):
        convergence_order([0.1, 0.05], [1e-2, 2.5e-3])
    with pytest.raises(ValueError):
        convergence_order([0.1, 0.2, 0.3], [1, 1, 1])


@given(st.floats(0.5, 6.0), st.floats(1e-3, 1e3), st.floats(1e-3, 0.5))
def test_order_recovers_power_law(p, c, h0):
    h = [h0, h0 / 2, h0 / 4, h0 / 8]
    res = [c * x**p for x in h]
    assume(min(res) > 1e-13)
    rec = convergence_order(h, res)
    assert rec.fitted_order == pytest.approx(p, rel=1e-9)


# ---------------------------------------------------------------- config

configs = st.builds(
    RunConfig,
    st.sampled_from([c.value for c in Command]),
    st.dictionaries(st.sampled_from(["n", "gamma", "Lambda", "num", "xi"]),
                    st.one_of(st.integers(-5, 5), st.floats(allow_nan=False,
                                                            allow_infinity=False))),
    st.one_of(st.none(), st.text("abc._", min_size=1, max_size=8)),
    st.dictionaries(st.sampled_from(["default", "sweep", "min_order"]),
                    st.floats(1e-12, 10.0)))


@given(configs)
def test_config_round_trip(cfg):
    again = RunConfig.from_json(cfg.to_json())
    assert again == cfg
    assert again.to_dict() == cfg.to_dict()


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig("foo")
    with pytest.raises(ConfigError):
        RunConfig("model", tolerances={"default": 0.0})
    with pytest.raises(ConfigError):
        RunConfig("model", {"band": {"rho": {"family": "nope"}}})
    with pytest.raises(ConfigError):
        RunConfig.from_json("{not json")
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"command": "model", "extra": 1})


def test_float_format():
    assert format_float(0.1) == "0.10000000000000001"
    assert float(format_float(math.pi)) == math.pi
    assert dumps({"a": [1, 0.5, float("inf"), float("nan")], "b": True}) == \
        '{"a": [1, 0.5, "inf", null], "b": true}'


# ---------------------------------------------------------------- commands

def _read_csv(path):
    lines = path.read_text().splitlines()
    header = [ln for ln in lines if ln.startswith("#")]
    rows = list(csv.DictReader(ln for ln in lines if not ln.startswith("#")))
    return header, rows


def test_model_command(tmp_path):
    out = tmp_path / "model.csv"
    assert main(["model", "--n", "3", "--gamma", "1", "--Lambda", "2", "--num", "21",
                 "-o", str(out)]) == 0
    header, rows = _read_csv(out)
    meta = dict(h[2:].split("=") for h in header)
    assert float(meta["a"]) == pytest.approx(1.0, rel=1e-15)
    assert float(meta["b"]) == pytest.approx(1 / math.sqrt(3), rel=1e-15)
    assert len(rows) == 21
    assert max(abs(float(r["lambda_residual"])) for r in rows) < 1e-10
    assert max(abs(float(r["ode_residual"])) for r in rows) < 1e-10


def test_model_via_config_and_env_dir(tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "model", "parameters": {
        "n": 4, "gamma": 1.0, "Lambda": 5.0, "num": 5}, "output_path": "m.csv"}))
    monkeypatch.setenv("WARPBAND_OUTPUT_DIR", str(tmp_path / "out"))
    assert main(["--config", str(cfg)]) == 0
    header, _ = _read_csv(tmp_path / "out" / "m.csv")
    assert "# b=0.70710678118654757" in header


def test_spectrum_command(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["spectrum", "--n", "3", "--gamma", "0", "--xi", "0.9", "--k-max", "2",
                 "-o", str(out)]) == 0
    _, rows = _read_csv(out)
    assert [int(r["multiplicity"]) for r in rows] == [1, 3, 5]
    assert float(rows[0]["lambda"]) == pytest.approx(1 - 1 / 0.81, abs=1e-15)


def test_verify_command(tmp_path):
    out = tmp_path / "v.jsonl"
    assert main(["verify", "-o", str(out)]) == 0
    rows = [json.loads(x) for x in out.read_text().splitlines()]
    assert {r["identity"] for r in rows} == {"first_variation", "linearized_eta", "rewrite",
                                             "vary_u", "vary_g"}
    assert all(r["pass"] for r in rows)


def test_verify_failing_check_exits_one(tmp_path):
    # a weight with a kink at the poles breaks the rewrite identity
    cfg = RunConfig("verify", {"identity": "rewrite", "u": {"family": "exp", "b": 0.5}},
                    str(tmp_path / "v.jsonl"))
    assert run_config(cfg) == 1


def test_cone_command(tmp_path):
    out = tmp_path / "c.jsonl"
    assert main(["cone", "--n", "4", "--gamma", "1", "--A", "0.8", "--t", "0.01", "0.005",
                 "-o", str(out)]) == 0
    rows = [json.loads(x) for x in out.read_text().splitlines()]
    kinds = [r["kind"] for r in rows]
    assert kinds == ["tensor", "condition", "leaf", "leaf"]
    assert all(r["residual_norm"] < 1e-10 for r in rows if r["kind"] == "leaf")


def test_cone_condition_failure_exits_one(tmp_path):
    assert main(["cone", "--n", "3", "--gamma", "-10", "--A", "1.5", "--t", "0.01",
                 "-o", str(tmp_path / "c.jsonl")]) == 1


def _check_band_cfg(tmp_path, band):
    cfg = tmp_path / "cb.json"
    cfg.write_text(json.dumps({"command": "check-band", "parameters": {
        "band": band, "model": {"n": 3, "gamma": 1.0, "Lambda": 2.0}},
        "output_path": str(tmp_path / "report.json")}))
    return cfg


def test_check_band_self(tmp_path):
    cfg = _check_band_cfg(tmp_path, {"model": {"n": 3, "gamma": 1.0, "Lambda": 2.0}})
    assert main(["check-band", "--config", str(cfg)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["verdict"] == "RigidityCase"
    assert rep["rigidity_flags_all_true"]
    _, rows = _read_csv(tmp_path / "report_sweep.csv")
    assert max(abs(float(r["monotone"])) for r in rows) < 1e-12


def test_check_band_violation_exits_one(tmp_path):
    cfg = tmp_path / "cb.json"
    dom = [0.2, math.pi - 0.2]
    cfg.write_text(json.dumps({"command": "check-band", "parameters": {
        "band": {"n": 3, "gamma": 0.0, "rho": {"family": "sin", "a": 1.1, "domain": dom},
                 "u": {"family": "linear", "a": 0.0, "offset": 1.0, "domain": dom}},
        "model": {"n": 3, "gamma": 0.0, "Lambda": 3.0, "domain": dom}},
        "output_path": str(tmp_path / "r.json")}))
    assert main(["--config", str(cfg)]) == 1
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["violations"] == ["lambda"]
    assert not (tmp_path / "r_sweep.csv").exists()


@pytest.mark.parametrize("argv", [["foo"], ["--config", "/nonexistent/x.json"], []])
def test_configuration_errors_exit_two(argv, capsys):
    assert main(argv) == 2


def test_unknown_command_in_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"command": "foo"}')
    assert main(["--config", str(cfg)]) == 2


def test_mismatched_subcommand(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"command": "model"}')
    assert main(["spectrum", "--config", str(cfg)]) == 2


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["spectrum", "-o", str(blocker / "sub" / "s.csv")]) == 2


def test_tolerance_override(tmp_path):
    # an absurdly tight tolerance turns roundoff in the model grid into a violation
    out = str(tmp_path / "m.csv")
    assert main(["model", "--tolerance", "1e-300", "-o", out]) == 1
    assert main(["model", "--tolerance", "1e-8", "-o", out]) == 0


def test_exit_codes_deterministic(tmp_path):
    cfg = RunConfig("cone", {"n": 3, "gamma": 0.0, "A": 0.5, "t": 0.01},
                    str(tmp_path / "c.jsonl"))
    first = (run_config(cfg), (tmp_path / "c.jsonl").read_text())
    assert (run_config(cfg), (tmp_path / "c.jsonl").read_text()) == first


def test_stdout_output(capsys):
    assert main(["spectrum", "--k-max", "1"]) == 0
    assert capsys.readouterr().out.startswith("k,multiplicity,lambda\n0,1,")


def test_load_config(tmp_path):
    p = tmp_path / "c.json"
    cfg = RunConfig("spectrum", {"n": 3}, None, {"default": 1e-9})
    p.write_text(cfg.to_json())
    assert load_config(p) == cfg

import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mscbo.cli import main, run_experiment
from mscbo.config import (
    ConfigError,
    ExperimentSpec,
    apply_settings,
    parse_config,
    preset,
    preset_names,
    serialize_config,
)
from mscbo.dynamics import RunConfig
from mscbo.problems import evaluate, get_problem

SMALL = {"K": 3, "N_bar": 4, "T": 0.3}


def _small_spec(tmp_path, **extra):
    return apply_settings(ExperimentSpec(), {**SMALL, "out": str(tmp_path), **extra})


# --- config ------------------------------------------------------------------------


def test_empty_document_uses_defaults():
    spec = parse_config("problem: schaffer1")
    run = spec.run
    assert (run.tau, run.T, run.drift_coefficient, run.sigma) == (0.1, 5.0, 1.0, 0.1)
    p = run.potential
    assert (p.R, p.r, p.A, p.a, p.R_f, p.r_f, p.A_f, p.a_f) == (0.001, 0.01, 0.0, 1.0, 0.0001, 1.0, 0.0, 1.0)
    assert (run.R_c, run.r_c, run.alpha, run.beta, run.eps_dom) == (1.0, 0.1, 100.0, 10.0, 1e-5)
    assert parse_config("") == ExperimentSpec()
    assert spec.seeds == (0,)


@pytest.mark.parametrize(
    "text,message",
    [
        ("tau: -1", "tau must be positive"),
        ("problem: zdt1", "registered problems: .*schaffer1"),
        ("bogus: 3", "unknown configuration key 'bogus'"),
        ("K: 2.5", "K must be an integer"),
        ("sigma: fast", "sigma must be a number"),
        ("seeds: []", "at least one seed"),
        ("emit: [front_csv, pictures]", "unknown emit flag"),
        ("[1, 2]", "key-value mapping"),
        ("a: [", "malformed"),
    ],
)
def test_parse_config_errors(text, message):
    with pytest.raises(ConfigError, match=message):
        parse_config(text)


def test_json_documents_parse():
    spec = parse_config('{"problem": "dent", "beta": 0, "seeds": [3, 4]}')
    assert spec.problem == "dent" and spec.run.beta == 0.0 and spec.seeds == (3, 4)


def test_round_trip_defaults_and_presets():
    for spec in [ExperimentSpec()] + [preset(n) for n in preset_names()]:
        assert parse_config(serialize_config(spec)) == spec


@settings(max_examples=40, deadline=None)
@given(
    problem=st.sampled_from(["schaffer1", "dent", "schaffer2", "quadratic"]),
    K=st.integers(1, 50),
    tau=st.floats(1e-3, 1.0),
    sigma=st.floats(0.0, 3.0),
    alpha=st.floats(1e-3, 1e4),
    c_rep=st.one_of(st.just(math.inf), st.floats(0.01, 10)),
    R_f=st.floats(0, 1),
    seeds=st.lists(st.integers(0, 2**64 - 1), min_size=1, max_size=4, unique=True),
    variant=st.sampled_from(["fixed", "adaptive", "full"]),
)
def test_round_trip_property(problem, K, tau, sigma, alpha, c_rep, R_f, seeds, variant):
    spec = apply_settings(ExperimentSpec(), {
        "problem": problem, "K": K, "tau": tau, "T": 3 * tau, "sigma": sigma, "alpha": alpha,
        "c_rep": c_rep, "R_f": R_f, "seeds": seeds, "variant": variant,
    })
    assert parse_config(serialize_config(spec)) == spec


def test_round_trip_explicit_weights():
    spec = apply_settings(ExperimentSpec(), {"K": 2, "weight_init": "explicit", "weights": [[0.1, 0.9], [0.7, 0.3]]})
    again = parse_config(serialize_config(spec))
    assert again == spec and again.run.weights == ((0.1, 0.9), (0.7, 0.3))


def test_presets():
    s1 = preset("paper-schaffer1")
    assert (s1.run.K, s1.run.N_bar, s1.run.n_steps, s1.run.variant) == (30, 20, 50, "full")
    three = preset("paper-three")
    assert (three.problem, three.run.K, three.run.N_bar, three.run.weight_init) == ("three", 50, 20, "simplex-uniform")
    dent = preset("paper-dent")
    assert dent.run.beta == 10.0 and dent.run.variant == "full" and dent.run.weight_init == "equidistant"
    demo = preset("paper-weights-demo")
    assert (demo.run.K, demo.run.N_bar) == (20, 50)
    assert preset("paper-schaffer2").problem == "schaffer2"
    with pytest.raises(ConfigError, match="unknown preset"):
        preset("paper-zdt")


def test_preset_key_in_document():
    spec = parse_config("preset: paper-three\nseeds: [5]")
    assert spec.problem == "three" and spec.run.K == 50 and spec.seeds == (5,)


# --- experiments -------------------------------------------------------------------


def test_one_seed_all_outputs(tmp_path):
    out = run_experiment(_small_spec(tmp_path))
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["seed0_diagnostics.csv", "seed0_front.csv", "seed0_summary.json", "seed0_weights.csv", "summary.json"]
    assert len(out.files) == 5


def test_file_formats(tmp_path):
    run_experiment(_small_spec(tmp_path, problem="dent"))
    with open(tmp_path / "seed0_front.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["swarm", "origin", "j", "x_1", "x_2", "f_1", "f_2", "nondominated"]
    assert len(rows) == 1 + 3 * 4 + 3
    with open(tmp_path / "seed0_weights.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["step", "swarm", "lambda_1", "lambda_2"] and len(rows) == 1 + 4 * 3
    with open(tmp_path / "seed0_diagnostics.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["step", "swarm", "V", "M", "E_1", "E_2"] and len(rows) == 1 + 4 * 3
    summary = json.loads((tmp_path / "seed0_summary.json").read_text())
    for key in ("problem", "variant", "seeds", "gd", "igd", "hv", "ni", "mean", "stddev"):
        assert key in summary


def test_front_rows_reevaluate(tmp_path):
    run_experiment(_small_spec(tmp_path, problem="three", weight_init="simplex-uniform"))
    pb = get_problem("three")
    with open(tmp_path / "seed0_front.csv") as fh:
        rows = list(csv.DictReader(fh))
    x = np.array([[float(r["x_1"]), float(r["x_2"])] for r in rows])
    f = np.array([[float(r[f"f_{i}"]) for i in (1, 2, 3)] for r in rows])
    np.testing.assert_allclose(evaluate(pb, x), f, atol=1e-9, rtol=0)
    assert {r["origin"] for r in rows} == {"particle", "mean"}


def test_float_precision(tmp_path):
    run_experiment(_small_spec(tmp_path))
    with open(tmp_path / "seed0_weights.csv") as fh:
        rows = list(csv.reader(fh))[1:]
    assert float(rows[0][2]) == pytest.approx(0.001, abs=1e-18)
    assert any(len(v.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) == 17 for r in rows for v in r[2:])


def test_multi_seed_aggregate(tmp_path):
    seeds = list(range(20))
    spec = _small_spec(tmp_path, seeds=seeds, emit=["summary_json"])
    out = run_experiment(spec)
    agg = json.loads((tmp_path / "summary.json").read_text())
    assert agg["seeds"] == seeds
    for key in ("gd", "igd", "hv", "ni"):
        assert len(agg[key]) == 20
        assert agg["mean"][key] == pytest.approx(np.mean(agg[key]))
        assert agg["stddev"][key] == pytest.approx(np.std(agg[key], ddof=1))
    assert len(out.files) == 21


def test_emit_subset(tmp_path):
    run_experiment(_small_spec(tmp_path, emit="front"))
    assert sorted(p.name for p in tmp_path.iterdir()) == ["seed0_front.csv", "summary.json"]


def test_byte_identical_outputs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_experiment(_small_spec(a, seeds=[7]))
    run_experiment(_small_spec(b, seeds=[7]))
    for name in ("seed7_front.csv", "seed7_weights.csv", "seed7_diagnostics.csv", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


# --- command line ------------------------------------------------------------------


def test_cli_success_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "exp.yaml"
    cfg.write_text("problem: dent\nK: 5\nN_bar: 4\nvariant: adaptive\nT: 0.5\n")
    out = tmp_path / "out"
    code = main(["--config", str(cfg), "--swarms", "2", "--iters", "3", "--seed", "4", "--seeds", "2",
                 "--out", str(out), "--quiet"])
    assert code == 0
    agg = json.loads((out / "summary.json").read_text())
    assert agg["problem"] == "dent" and agg["variant"] == "adaptive" and agg["seeds"] == [4, 5]
    with open(out / "seed4_weights.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 1 + 4 * 2


def test_cli_print_config_shows_resolution(capsys):
    assert main(["--preset", "paper-three", "--particles", "7", "--iters", "10", "--print-config"]) == 0
    spec = parse_config(capsys.readouterr().out)
    assert spec.problem == "three" and spec.run.N_bar == 7 and spec.run.K == 50
    assert spec.run.n_steps == 10


@pytest.mark.parametrize(
    "argv",
    [
        ["--problem", "zdt1"],
        ["--preset", "nope"],
        ["--no-such-flag"],
        ["--swarms", "many"],
        ["--variant", "fast"],
        ["--iters", "0"],
        ["--config", "/nonexistent/exp.yaml"],
        ["--emit", "plots"],
    ],
)
def test_cli_usage_errors(argv, capsys):
    assert main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_cli_runtime_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["--swarms", "2", "--particles", "2", "--iters", "1", "--out", str(blocker / "sub"), "--quiet"]) == 2


def test_cli_three_objective_run(tmp_path):
    code = main(["--problem", "three", "--swarms", "4", "--particles", "3", "--iters", "2",
                 "--out", str(tmp_path), "--quiet"])
    assert code == 0

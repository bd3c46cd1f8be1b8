"""Command-line interface: JSON output and exit codes."""

import json

import pytest

from conftest import chain_model
from sgsolve.cli import run
from sgsolve.explicit import serialize


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_generator_mean_payoff_ce(capsys):
    code, doc = run_json(
        capsys,
        ["--generate", "fig1left", "--objective", "mean-payoff", "--mode", "ce"],
    )
    assert code == 0
    assert doc["mode"] == "ce"
    assert doc["objective"] == "mean-payoff"
    assert doc["value"] == pytest.approx(5.0, abs=1e-6)
    assert doc["lower"] <= doc["value"] <= doc["upper"]
    assert doc["upper"] - doc["lower"] < 2 * doc["precision"]
    assert doc["seed"] is None


def test_generator_reach_pe(capsys):
    code, doc = run_json(
        capsys,
        [
            "--generate", "fig2chain", "--param", "k=2",
            "--objective", "reach", "--goal", "goal",
            "--mode", "pe", "--seed", "11",
        ],
    )
    assert code == 0
    assert doc["mode"] == "pe"
    assert doc["seed"] == 11
    assert doc["value"] == pytest.approx(0.25, abs=1e-6)


def test_goal_as_state_ids(capsys):
    code, doc = run_json(
        capsys,
        [
            "--generate", "fig1right",
            "--objective", "reach", "--goal", "1",
            "--mode", "ce",
        ],
    )
    assert code == 0
    assert doc["value"] == pytest.approx(0.0, abs=1e-6)


def test_safety_objective(capsys):
    code, doc = run_json(
        capsys,
        [
            "--generate", "fig1right",
            "--objective", "safety", "--unsafe", "x_region",
            "--mode", "ce",
        ],
    )
    assert code == 0
    assert doc["objective"] == "safety"
    # Minimizer (trying to reach the unsafe region after dualization)
    # moves to it immediately.
    assert doc["value"] == pytest.approx(0.0, abs=1e-6)


def test_model_file(tmp_path, capsys):
    path = tmp_path / "chain.sg"
    path.write_text(serialize(chain_model(), {"goal": frozenset({2})}))
    code, doc = run_json(
        capsys,
        ["--model", str(path), "--objective", "reach", "--goal", "goal"],
    )
    assert code == 0
    assert doc["value"] == pytest.approx(1.0, abs=1e-6)


def test_missing_file_is_usage_error(capsys):
    code = run(["--model", "/nonexistent.sg", "--objective", "mean-payoff"])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_bad_generator_parameter(capsys):
    code = run(["--generate", "fig2chain", "--param", "k=zero",
                "--objective", "mean-payoff"])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_label(capsys):
    code = run(["--generate", "fig1left", "--objective", "reach",
                "--goal", "nosuchlabel"])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_reach_requires_goal(capsys):
    with pytest.raises(SystemExit):
        run(["--generate", "fig1left", "--objective", "reach"])


def test_budget_exhaustion_exit_code(capsys):
    code, doc = run_json(
        capsys,
        [
            "--generate", "fig2chain", "--param", "k=3",
            "--objective", "reach", "--goal", "goal",
            "--mode", "ce", "--max-iterations", "1",
        ],
    )
    assert code == 2
    assert doc["lower"] <= 0.125 <= doc["upper"]


def test_json_schema(capsys):
    _, doc = run_json(
        capsys,
        ["--generate", "fig1left", "--objective", "mean-payoff", "--mode", "ce"],
    )
    assert set(doc) == {
        "value", "lower", "upper", "precision", "mode", "objective",
        "states_explored", "iterations", "time_ms", "seed",
    }

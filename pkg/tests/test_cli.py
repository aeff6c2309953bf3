"""
Tests for the command-line surface and its exit codes.
"""

import json
import shutil
from pathlib import Path

import pytest

from conftest import ALP_PROBLEM, FIXTURES, KNOWLEDGE_BASE, alignment_reply, generation_reply, read_fixture, write_script
from src.cli.commands import ExitCode, run_cli, settings_from_args
from src.cli.parser import build_parser
from src.models.config import BackendKind, Strategy


def fixture(name: str) -> str:
    return str(FIXTURES / name)


@pytest.fixture
def kb_copy(tmp_path):
    target = tmp_path / "kb"
    shutil.copytree(KNOWLEDGE_BASE, target)
    return str(target)


@pytest.fixture
def problem_file(tmp_path):
    path = tmp_path / "alp.txt"
    path.write_text(ALP_PROBLEM, encoding="utf-8")
    return str(path)


def test_compile_clean_model(capsys):
    code = run_cli(["compile", fixture("alp.mod"), fixture("alp.dat")])
    assert code == ExitCode.OK
    assert "9 variable(s), 12 constraint(s)" in capsys.readouterr().out


def test_compile_errors_go_to_stderr(capsys):
    code = run_cli(["compile", fixture("alp_chained.mod"), fixture("alp.dat")])
    assert code == ExitCode.COMPILE_ERRORS
    err = capsys.readouterr().err
    assert "Semantic Error (Line 20): Chained comparisons" in err
    assert "error(s)" in err


def test_compile_missing_file(tmp_path, capsys):
    code = run_cli(["compile", str(tmp_path / "absent.mod"), fixture("alp.dat")])
    assert code == ExitCode.USAGE
    assert "Model file not found" in capsys.readouterr().err


def test_solve_prints_objective(capsys):
    code = run_cli(["solve", fixture("knapsack.mod"), fixture("knapsack.dat")])
    out = capsys.readouterr().out.splitlines()
    assert code == ExitCode.OK
    assert out[:2] == ["Status: optimal", "Objective: 21"]
    assert "  take[2] = 1" in out
    assert "  take[1] = 0" not in out


def test_solve_all_prints_zero_values(capsys):
    run_cli(["solve", fixture("knapsack.mod"), fixture("knapsack.dat"), "--all"])
    assert "  take[1] = 0" in capsys.readouterr().out.splitlines()


def test_solve_alp_objective_is_zero(capsys):
    assert run_cli(["solve", fixture("alp.mod"), fixture("alp.dat")]) == ExitCode.OK
    assert "Objective: 0" in capsys.readouterr().out.splitlines()


def test_solve_infeasible(capsys):
    code = run_cli(["solve", fixture("infeasible.mod"), fixture("infeasible.dat")])
    assert code == ExitCode.NOT_OPTIMAL
    assert capsys.readouterr().out.startswith("Status: infeasible")


def test_solve_emit_lp(capsys):
    code = run_cli(["solve", fixture("knapsack.mod"), fixture("knapsack.dat"), "--emit-lp"])
    out = capsys.readouterr().out
    assert code == ExitCode.OK
    assert out.startswith("\\* model *\\")
    assert out.endswith("End\n")


def test_solve_rejects_bad_limits():
    with pytest.raises(SystemExit) as info:
        run_cli(["solve", fixture("knapsack.mod"), fixture("knapsack.dat"), "--node-limit", "0"])
    assert info.value.code == 2


def test_run_with_scripted_backend(tmp_path, kb_copy, problem_file, alp_trace, clean_env, capsys):
    script = write_script(tmp_path / "script.jsonl", alp_trace)
    out = tmp_path / "run"
    code = run_cli(["run", problem_file, "--backend", "scripted", "--script", str(script),
                    "--kb", kb_copy, "--out", str(out)])
    stdout = capsys.readouterr().out
    assert code == ExitCode.OK
    assert "Outcome: aligned" in stdout
    assert "Iterations: 2" in stdout
    assert "Tokens: 3700 prompt, 910 completion" in stdout
    assert (out / "model.mod").read_text(encoding="utf-8") == read_fixture("alp.mod")


def test_run_budget_exhausted(tmp_path, kb_copy, problem_file, clean_env, capsys):
    broken = generation_reply("dvar float+ x;\nminimize obj: x\n", "")
    script = write_script(tmp_path / "script.jsonl", [broken, alignment_reply(False, "Nothing compiles.")])
    code = run_cli(["run", problem_file, "--backend", "scripted", "--script", str(script),
                    "--kb", kb_copy, "--budget", "1", "--out", str(tmp_path / "run")])
    assert code == ExitCode.BUDGET_EXHAUSTED
    stdout = capsys.readouterr().out
    assert "Outcome: budgetExhausted" in stdout
    assert "Assessment: Nothing compiles." in stdout


def test_run_short_script_is_a_backend_failure(tmp_path, kb_copy, problem_file, clean_env):
    script = write_script(tmp_path / "script.jsonl", [])
    code = run_cli(["run", problem_file, "--backend", "scripted", "--script", str(script),
                    "--kb", kb_copy, "--out", str(tmp_path / "run")])
    assert code == ExitCode.BACKEND


def test_run_without_api_key(problem_file, tmp_path, clean_env, capsys):
    code = run_cli(["run", problem_file, "--strategy", "standard", "--out", str(tmp_path / "run")])
    assert code == ExitCode.AUTH
    assert "OPENAI_API_KEY" in capsys.readouterr().err


def test_run_missing_knowledge_base(problem_file, tmp_path, clean_env):
    script = write_script(tmp_path / "script.jsonl", [])
    code = run_cli(["run", problem_file, "--backend", "scripted", "--script", str(script),
                    "--kb", str(tmp_path / "absent")])
    assert code == ExitCode.USAGE


def test_run_empty_problem(tmp_path, clean_env):
    empty = tmp_path / "empty.txt"
    empty.write_text("  \n", encoding="utf-8")
    assert run_cli(["run", str(empty)]) == ExitCode.USAGE


def test_eval_suite(tmp_path, kb_copy, clean_env, capsys):
    suite = tmp_path / "kp.jsonl"
    suite.write_text(json.dumps({"id": "kp", "description": "Pick items under a weight limit.",
                                 "expected_objective": 21}) + "\n", encoding="utf-8")
    script = write_script(tmp_path / "script.jsonl", [
        generation_reply(read_fixture("knapsack.mod"), read_fixture("knapsack.dat")), alignment_reply(True),
    ])
    out = tmp_path / "report"
    code = run_cli(["eval", str(suite), "--backend", "scripted", "--script", str(script),
                    "--kb", kb_copy, "--out", str(out)])
    stdout = capsys.readouterr().out
    assert code == ExitCode.OK
    assert "Suite kp: 1 instance(s) x 1 repetition(s) = 1 run(s)" in stdout
    assert "  kp#1: AC (observed 21, expected 21)" in stdout
    assert (out / "report.json").exists()


def test_eval_empty_suite(tmp_path, clean_env, capsys):
    suite = tmp_path / "empty.jsonl"
    suite.write_text("", encoding="utf-8")
    assert run_cli(["eval", str(suite)]) == ExitCode.USAGE
    assert "empty" in capsys.readouterr().err


def test_kb_index(kb_copy, clean_env, capsys):
    assert run_cli(["kb", "index", "--kb", kb_copy]) == ExitCode.OK
    assert "Indexed 22 exemplar(s)" in capsys.readouterr().out
    assert (Path(kb_copy) / "manifest.json").exists()


def test_kb_index_no_cache(tmp_path, kb_copy, clean_env):
    assert run_cli(["kb", "index", "--kb", kb_copy, "--no-cache"]) == ExitCode.OK
    assert not (tmp_path / "kb" / "manifest.json").exists()


def test_suite_convert(tmp_path, capsys):
    source = tmp_path / "bench.json"
    source.write_text(json.dumps([{"question": "Plan shifts.", "answer": 7}]), encoding="utf-8")
    destination = tmp_path / "suite.jsonl"
    assert run_cli(["suite", "convert", str(source), str(destination), "--prefix", "shift"]) == ExitCode.OK
    assert "Wrote 1 instance(s)" in capsys.readouterr().out
    assert json.loads(destination.read_text(encoding="utf-8").splitlines()[0])["id"] == "shift-0001"


def test_settings_precedence(tmp_path, monkeypatch, clean_env):
    config = tmp_path / "settings.json"
    config.write_text(json.dumps({"budget": 9, "strategy": "cot"}), encoding="utf-8")
    monkeypatch.setenv("OPLFORGE_MODEL", "from-env")
    monkeypatch.setenv("OPLFORGE_KB_PATH", "env-kb")
    args = build_parser().parse_args(["run", "p.txt", "--config", str(config), "--budget", "2",
                                      "--kb", "flag-kb", "--backend", "scripted", "--temperature", "0.3"])
    settings = settings_from_args(args)
    assert settings.budget == 9
    assert settings.strategy == Strategy.COT
    assert settings.kb_path == "flag-kb"
    assert settings.model == "from-env"
    assert settings.backend == BackendKind.SCRIPTED
    assert settings.decoding.temperature == 0.3
    assert settings.k == 3


def test_invalid_settings_file(tmp_path, problem_file, clean_env):
    config = tmp_path / "settings.json"
    config.write_text(json.dumps({"budget": 0}), encoding="utf-8")
    assert run_cli(["run", problem_file, "--config", str(config)]) == ExitCode.USAGE
    assert run_cli(["run", problem_file, "--config", str(tmp_path / "absent.json")]) == ExitCode.USAGE


def test_ablation_flags_default_on(clean_env):
    settings = settings_from_args(build_parser().parse_args(["run", "p.txt"]))
    assert settings.grammar and settings.retrieval and settings.alignment and settings.literate


def test_ablation_flags_switch_off(clean_env):
    args = build_parser().parse_args(["eval", "suite.jsonl", "--no-grammar", "--no-retrieval",
                                      "--no-alignment", "--no-literate"])
    settings = settings_from_args(args)
    assert not settings.grammar
    assert not settings.retrieval
    assert not settings.alignment
    assert not settings.literate


def test_run_without_alignment_or_retrieval(tmp_path, problem_file, clean_env, capsys):
    good = generation_reply("dvar float+ x;\nminimize obj: x;\nsubject to {\n  c1: x >= 1;\n}\n", "")
    script = write_script(tmp_path / "script.jsonl", [good])
    code = run_cli(["run", problem_file, "--backend", "scripted", "--script", str(script),
                    "--kb", str(tmp_path / "absent"), "--no-alignment", "--no-retrieval",
                    "--out", str(tmp_path / "run")])
    assert code == ExitCode.OK
    assert "Outcome: aligned" in capsys.readouterr().out

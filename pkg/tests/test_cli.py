from __future__ import annotations

import json

import pytest

from inicalc.cli.commands import RunRecord, run_check, run_eval
from inicalc.cli.render import render_text
from inicalc.main import main


def run(capsys, *argv: str) -> tuple[int, dict]:
    code = main([*argv, "--format", "json"])
    return code, json.loads(capsys.readouterr().out)


# ── check ──────────────────────────────────────────────────────────

def test_check_reports_the_type(capsys, programs):
    code, record = run(capsys, "check", str(programs / "tensor_to_prod.ini"))
    assert code == 0
    assert record["outcome"]["type"] == "Bool (x) Bool -o Bool * Bool"
    assert record["outcome"]["layer"] == "INI"


def test_check_rejects_branching_on_a_box(capsys, programs):
    code, record = run(capsys, "check", str(programs / "layer_mismatch.ini"))
    assert code == 1
    assert record["outcome"]["error"]["kind"] == "LayerMismatch"
    assert record["outcome"]["error"]["span"]["line"] >= 4


def test_check_names_the_shared_variable(capsys, programs):
    code, record = run(capsys, "check", str(programs / "shared_app.ini"))
    assert code == 1
    error = record["outcome"]["error"]
    assert error["kind"] == "SharedAcrossTensor"
    assert error["variable"] == "x"


def test_check_text_output(capsys, programs):
    assert main(["check", str(programs / "correlated.ini")]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[-1] == "Bool * Bool"


# ── eval ───────────────────────────────────────────────────────────

def test_eval_correlated_pair(capsys, programs):
    code, record = run(capsys, "eval", str(programs / "correlated.ini"))
    assert code == 0
    assert record["model"] == "dist"
    assert record["outcome"]["value"] == {"(tt,tt)": "1/2", "(ff,ff)": "1/2"}


def test_eval_in_the_name_model(capsys, programs):
    code, record = run(capsys, "eval", str(programs / "fresh_pair.ini"), "--model", "name")
    assert code == 0
    assert record["outcome"]["value"] == {"names": 2, "value": "(n0,n1)"}


def test_eval_with_a_missing_primitive(capsys, programs):
    code, record = run(capsys, "eval", str(programs / "coin_tensor.ini"), "--model", "pset")
    assert code == 1
    assert record["outcome"]["error"]["kind"] == "PrimUnknown"


def test_eval_erased_two_level_program(capsys, programs):
    code, record = run(capsys, "eval", str(programs / "sample_if.ini"), "--erased")
    assert code == 0
    assert record["outcome"]["value"] == {"(tt,tt)": "1/2", "(ff,ff)": "1/2"}


def test_eval_leader_election(capsys, programs):
    code, record = run(capsys, "eval", str(programs / "leader.ini"))
    assert code == 0
    assert record["outcome"]["text"] == "M{inl tt: 1/4, inl ff: 1/4, inr tt: 1/2}"


# ── independence ───────────────────────────────────────────────────

def test_independence_of_one_level_tensor(capsys, programs):
    code, record = run(capsys, "independence", str(programs / "coin_tensor.ini"))
    assert code == 0
    outcome = record["outcome"]
    assert outcome["is_product"]
    assert outcome["marginal1"] == {"tt": "1/2", "ff": "1/2"}
    assert outcome["witness"] is None


def test_independence_of_two_boxes(capsys, programs):
    code, record = run(capsys, "independence", str(programs / "two_boxes.ini"))
    assert code == 0
    assert set(record["outcome"]["joint"].values()) == {"1/4"}
    assert len(record["outcome"]["joint"]) == 4


def test_independence_needs_a_tensor(capsys, programs):
    code, record = run(capsys, "independence", str(programs / "correlated.ini"))
    assert code == 1
    assert record["outcome"]["error"]["kind"] == "UsageError"
    assert "not a tensor type" in record["outcome"]["error"]["message"]


# ── translate ──────────────────────────────────────────────────────

def test_translate_multiplicative(capsys, tmp_path):
    source = tmp_path / "mixed.ini"
    source.write_text("#lang ini1\ncoin (x) true\n")
    code, record = run(capsys, "translate", str(source), "--fragment", "mult")
    assert code == 0
    outcome = record["outcome"]
    assert outcome["fragment"] == "Multiplicative"
    assert outcome["type"] == "M Bool (x) M Bool"
    assert outcome["program"].startswith("#lang ini2 layer=I")
    assert "(sample as in coin) (x) (sample as in true)" in outcome["program"]


def test_translate_rejects_two_level_input(capsys, programs):
    code, record = run(capsys, "translate", str(programs / "two_boxes.ini"))
    assert code == 1
    assert record["outcome"]["error"]["kind"] == "UsageError"


# ── suite / gen ────────────────────────────────────────────────────

def test_suite_equations(capsys):
    code, record = run(capsys, "suite", "equations", "--count", "1", "--depth", "3", "--seed", "5")
    assert code == 0
    assert record["command"] == "suite equations"
    assert len(record["outcome"]["results"]) == 24
    assert record["outcome"]["failure_count"] == 0


def test_gen(capsys):
    code, record = run(capsys, "gen", "--count", "3", "--depth", "2", "--layer", "NI")
    assert code == 0
    assert len(record["outcome"]["terms"]) == 3


def test_gen_rejects_bad_settings(capsys):
    code, record = run(capsys, "gen", "--depth", "0")
    assert code == 1
    assert record["outcome"]["error"]["kind"] == "UsageError"


# ── errors and rendering ───────────────────────────────────────────

def test_bad_flag_exits_with_one():
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--bogus"])
    assert exc.value.code == 1


def test_missing_file(capsys):
    code, record = run(capsys, "check", "no/such/file.ini")
    assert code == 1
    assert record["outcome"]["error"]["kind"] == "UsageError"


def test_output_is_deterministic(capsys, programs):
    path = str(programs / "leader.ini")
    assert main(["eval", path, "--format", "json"]) == 0
    first = capsys.readouterr().out
    assert main(["eval", path, "--format", "json"]) == 0
    assert capsys.readouterr().out == first


def test_render_text_without_color():
    record = run_check("#lang ini1\nfn z: Bool (x) Bool => let a (x) b = z in (a, b)", "inline")
    assert render_text(record, color=False).splitlines() == [
        "check inline [ok]",
        "Bool (x) Bool -o Bool * Bool",
    ]

    failed = run_eval("#lang ini1\nlet x = in x", "broken")
    text = render_text(failed, color=False)
    assert text.startswith("eval broken [error]")
    assert "ParseError" in text


def test_render_text_for_a_failed_check():
    record = RunRecord(command="independence", input="p.ini", outcome={
        "is_product": False, "marginal1": {"tt": "1"}, "marginal2": {"ff": "1"},
        "witness": "(tt,ff) joint 0 product 1/4", "name_overlap": [], "joint": None,
    }, exit_code=2)
    lines = render_text(record, color=False).splitlines()
    assert lines[0] == "independence p.ini [FAILED]"
    assert lines[1].startswith("NOT a product")
    assert lines[2] == "witness (tt,ff) joint 0 product 1/4"

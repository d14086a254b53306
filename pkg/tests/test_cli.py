import glob
import json
import os

import pytest

from leviflags.cli import format_report, main, run_command
from leviflags.model import parse_model

MODELS = os.path.join(os.path.dirname(__file__), os.pardir, "models")

_cache = {}


def model(name):
    if name not in _cache:
        with open(os.path.join(MODELS, name), "r", encoding="utf-8") as fh:
            _cache[name] = parse_model(fh.read())
    return _cache[name]


def run(name, *args):
    return run_command(model(name), args[0], list(args[1:]))


def as_json(report):
    return json.loads(format_report(report, "json").decode("utf-8"))


def test_count_three_parabolic():
    out = as_json(run("three_parabolic.lf", "count", "--levi", "L"))
    assert out["result"] == {"kind": "finite", "value": 3}
    assert out["diagnostics"] == []


def test_levi_check_reports_positions():
    out = as_json(run("three_parabolic.lf", "levi-check",
                      "--couple", "F,G", "--levi", "L"))
    assert out["result"]["value"] is True
    assert out["result"]["kappa"] == [2, 3]


def test_levi_check_negative_example():
    rep = run("not_levi.lf", "levi-check", "--couple", "F,G", "--levi", "L")
    assert rep.ok()
    out = as_json(rep)
    assert out["result"] == {"kind": "bool", "value": False}


def test_enumerate_all_orders_two_couple():
    out = as_json(run("two_couple.lf", "enumerate", "--levi", "L"))
    assert out["result"]["value"] == 2
    orders = [c["order"] for c in out["couples"]]
    assert orders == [[1, 2], [2, 1]]
    first = out["couples"][0]
    assert first["flagV"][1] == "span { V[i] for i in 1 mod 2 }"
    assert first["flagVstar"][1] == "span { Vstar[i] for i in 0 mod 2 }"


def test_enumerate_single_order_matches_minimal():
    single = as_json(run("three_parabolic.lf", "enumerate",
                         "--levi", "L", "--order", "O12"))
    assert single["result"]["value"] == 1
    minimal = as_json(run("three_parabolic.lf", "minimal-couple",
                          "--levi", "L", "--order", "1,2"))
    assert minimal["couples"] == single["couples"]


def test_uncountable_count_carries_witness():
    text = """space V dual Vstar indices positive
special a b in V
special at bt in Vstar
pair a . at = 1
pair b . bt = 1
subspace X in V = span { V[i] for i in 0 mod 1 }
subspace Y in Vstar = span { Vstar[i] for i in 0 mod 1 }
levi L = sl(X, Y)
"""
    m = parse_model(text)
    out = as_json(run_command(m, "count", ["--levi", "L"]))
    assert out["result"]["kind"] == "uncountable"
    assert out["result"]["value"] is None
    assert out["result"]["witness_J"] == [1]
    out = as_json(run_command(m, "enumerate", ["--levi", "L"]))
    assert out["result"]["kind"] == "uncountable"
    assert out["result"]["witness_J"] == [1]


def test_perp_dim_closure_results():
    out = as_json(run("one_block.lf", "perp", "Y"))
    assert out["result"] == {"kind": "subspace", "value": "span { V[1] }"}
    out = as_json(run("one_block.lf", "dim", "CV1"))
    assert out["result"] == {"kind": "finite", "value": 1}
    out = as_json(run("selfdual_w.lf", "dim", "UW", "mod", "U1"))
    assert out["result"]["kind"] == "uncountable"
    assert "infinite" in out["diagnostics"][0]
    out = as_json(run("selfdual_w.lf", "closure", "W"))
    assert out["result"]["value"] == \
        "span { V[1], V[i] for i in 0 mod 1 from 2 }"


def test_trace_count():
    out = as_json(run("one_block.lf", "trace-count", "--couple", "F,G"))
    assert out["result"] == {"kind": "finite", "value": 2}
    out = as_json(run("three_parabolic.lf", "trace-count",
                      "--couple", "F,G"))
    assert out["result"]["kind"] == "uncountable"


def test_selfdual_unique_finds_the_single_flag():
    out = as_json(run("selfdual_w.lf", "selfdual-unique", "--levi", "M"))
    assert out["result"]["value"] == 1
    assert out["couples"][0]["flagV"] == [
        "0", "span { V[1] }",
        "span { V[1], V[i] for i in 0 mod 1 from 2 }", "V"]
    assert out["couples"][0]["flagVstar"] == []


def test_taut_check():
    out = as_json(run("selfdual_w.lf", "taut-check", "F"))
    assert out["result"] == {"kind": "bool", "value": True}
    out = as_json(run("not_levi.lf", "taut-check", "F", "G"))
    assert out["result"] == {"kind": "bool", "value": True}
    rep = run("selfdual_w.lf", "taut-check", "F", "F")
    assert not rep.ok()


def test_socle():
    out = as_json(run("three_parabolic.lf", "socle", "--levi", "L"))
    assert out["result"]["value"] == \
        "span { V[1], V[i] for i in 0 mod 1 from 3 }"


def test_flag_from_chain_sides():
    out = as_json(run("three_parabolic.lf", "flag-from-chain", "CV1", "M1"))
    assert out["couples"][0]["flagV"][0] == "0"
    assert out["couples"][0]["flagVstar"] == []
    out = as_json(run("three_parabolic.lf", "flag-from-chain", "N1"))
    assert out["couples"][0]["flagV"] == []
    assert out["couples"][0]["flagVstar"][-1] == "Vstar"


def test_errors_are_diagnostics_with_prefix():
    rep = run("one_block.lf", "perp", "NOPE")
    assert not rep.ok()
    assert rep.diagnostics == ["error: unknown subspace 'NOPE'"]
    rep = run("one_block.lf", "frobnicate")
    assert not rep.ok()
    rep = run("one_block.lf", "enumerate", "--levi", "L",
              "--order", "2,1")
    assert not rep.ok()
    assert "permutation" in rep.diagnostics[0]


def test_json_is_deterministic():
    a = format_report(run("three_parabolic.lf", "enumerate", "--levi", "L"),
                      "json")
    b = format_report(run("three_parabolic.lf", "enumerate", "--levi", "L"),
                      "json")
    assert a == b
    assert a.endswith(b"\n")


def test_text_format_chain_notation():
    text = format_report(run("three_parabolic.lf", "minimal-couple",
                             "--levi", "L", "--order", "O12"),
                         "text").decode("utf-8")
    lines = text.strip().split("\n")
    assert lines[0] == "command minimal-couple"
    assert lines[1] == "result couples 1"
    assert lines[2] == "couple order=(1, 2)"
    assert lines[3].strip().startswith("0 ⊂ ")
    assert lines[4].strip().startswith("Vstar ⊃ ")


def test_oracle_command(monkeypatch):
    monkeypatch.setenv("TOOL_SEED", "13")
    rep = run("one_block.lf", "oracle", "--cutoffs", "6,12")
    assert rep.ok()
    out = as_json(rep)
    assert out["result"] == {"kind": "bool", "value": True}
    assert any("membership X" in d for d in out["diagnostics"])
    again = format_report(run("one_block.lf", "oracle", "--cutoffs", "6,12"),
                          "json")
    assert format_report(rep, "json") == again


def test_main_end_to_end(capsysbinary, tmp_path):
    path = os.path.join(MODELS, "one_block.lf")
    code = main(["--model", path, "count", "--levi", "L"])
    out = json.loads(capsysbinary.readouterr().out.decode("utf-8"))
    assert code == 0
    assert out["result"] == {"kind": "finite", "value": 1}

    code = main(["--model", path, "perp", "NOPE"])
    out = json.loads(capsysbinary.readouterr().out.decode("utf-8"))
    assert code == 1
    assert out["diagnostics"][0].startswith("error: ")

    bad = tmp_path / "bad.lf"
    bad.write_text("space V dual Vstar indices positive\nsubspace X")
    code = main(["--model", str(bad), "dim", "X"])
    out = json.loads(capsysbinary.readouterr().out.decode("utf-8"))
    assert code == 1
    assert "line" in out["diagnostics"][0]

    code = main(["--format", "nope", "--model", path, "count"])
    assert code == 2
    capsysbinary.readouterr()


def test_bundled_models_run_their_headline_command():
    headline = {
        "two_couple.lf": (["enumerate", "--levi", "L"], 2),
        "three_parabolic.lf": (["count", "--levi", "L"], 3),
        "one_block.lf": (["count", "--levi", "L"], 1),
        "not_levi.lf": (["levi-check", "--couple", "F,G", "--levi", "L"],
                        False),
        "selfdual_w.lf": (["selfdual-unique", "--levi", "M"], 1),
    }
    for name, (args, expected) in headline.items():
        rep = run_command(model(name), args[0], args[1:])
        assert rep.ok(), name
        assert rep.value == expected, name

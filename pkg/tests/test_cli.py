import json

import pytest

from sptree.cli import main

LEAF_JSON = '{"atoms":[],"children":[]}'
CHAIN = {"atoms": [], "children": [[0, {"atoms": [], "children": [[0, {"atoms": ["p"], "children": []}]]}]]}


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse(capsys):
    code, out, _ = run(capsys, "parse", "<0>p & q")
    assert code == 0
    assert json.loads(out) == {"and": [{"dia": [0, {"var": "p"}]}, {"var": "q"}]}


def test_parse_error_exits_65_with_a_caret(capsys):
    code, _, err = run(capsys, "parse", "<0>p &")
    assert code == 65
    assert "^" in err


def test_usage_error_exits_64(capsys):
    with pytest.raises(SystemExit) as info:
        main(["prove", "p"])
    assert info.value.code == 64


def test_metrics(capsys):
    code, out, _ = run(capsys, "metrics", LEAF_JSON)
    assert code == 0 and json.loads(out) == {"height": 0, "nodes": 1, "width": 1}


def test_embed_roundtrip(capsys):
    _, out, _ = run(capsys, "embed", "to-tree", "<0>p & q")
    t = json.loads(out)
    assert t == {"atoms": ["q"], "children": [[0, {"atoms": ["p"], "children": []}]]}
    code, out, _ = run(capsys, "embed", "to-formula", json.dumps(t))
    assert code == 0 and "dia" in out


def test_check_with_no_steps_echoes_the_start(capsys):
    code, out, _ = run(capsys, "check", json.dumps({"start": CHAIN, "steps": []}))
    assert code == 0
    assert CHAIN in json.loads(out).values()


def test_check_rejects_a_step_outside_the_system(capsys):
    d = {"start": CHAIN, "steps": [{"kind": "four", "pos": "", "i": 1}]}
    code, _, _ = run(capsys, "check", "--sys", "k", json.dumps(d))
    assert code == 1
    code, _, _ = run(capsys, "check", "--sys", "k4", json.dumps(d))
    assert code == 0


def test_apply_text_rule(capsys):
    code, out, _ = run(capsys, "apply", json.dumps(CHAIN), "4@e(i=1)")
    assert code == 0
    assert json.loads(out) == {"atoms": [], "children": [[0, {"atoms": ["p"], "children": []}]]}


def test_prove_exit_codes(capsys):
    code, out, _ = run(capsys, "prove", "<1>p & <0>q", "<1>(p & <0>q)")
    assert code == 0 and json.loads(out)["verdict"] == "proved"
    code, _, _ = run(capsys, "prove", "--sys", "k", "p", "<0>p")
    assert code == 1
    code, _, _ = run(capsys, "prove", "--budget", "1", "--max-states", "3", "p", "<0>p")
    assert code == 2


def test_oracle(capsys):
    assert run(capsys, "oracle", "p & q", "q")[0] == 0
    assert run(capsys, "oracle", "p", "<0>p")[0] == 1


def test_normalize_with_bounds(capsys):
    d = {"start": CHAIN, "steps": [{"kind": "rho_plus", "pos": "1.1", "i": 1},
                                   {"kind": "four", "pos": "", "i": 1}]}
    code, out, _ = run(capsys, "normalize", "--verify-bounds", json.dumps(d))
    assert code == 0
    body = json.loads(out)
    assert body["bounds"]["ok"] and body["bounds"]["regime"] == "with-j"
    assert [r["kind"] for r in body["steps"]] == ["four", "rho_plus"]


def test_text_format(capsys):
    code, out, _ = run(capsys, "--format", "text", "parse", "<0>p & q")
    assert code == 0 and "<0>" in out

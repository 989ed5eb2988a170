import io
import json
import shutil

import pytest

from conftest import model_path
from heraklit.cli import run_command
from heraklit.dsl import parse, parse_file

RESTAURANT = model_path("restaurant.hkt")


def run(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(list(argv), out, err, io.StringIO(stdin))
    return code, out.getvalue(), err.getvalue()


def test_check():
    assert run("check", RESTAURANT) == (0, "", "")


def test_check_reports_diagnostics(tmp_path):
    bad = tmp_path / "bad.hkt"
    bad.write_text("sort S = {a};\nplace p : T;\n")
    code, out, err = run("check", str(bad))
    assert code == 1 and out == ""
    assert "bad.hkt:2:" in err and "undeclared sort T" in err
    assert "Traceback" not in err


@pytest.mark.parametrize("argv", [
    ["check"],
    ["frobnicate", RESTAURANT],
    ["simulate", RESTAURANT, "--policy", "best"],
    ["simulate", RESTAURANT, "--steps", "-1"],
    ["space", RESTAURANT, "--max-states", "0"],
    ["check", "/nonexistent/model.hkt"],
    [],
])
def test_usage_errors(argv):
    code, out, err = run(*argv)
    assert code == 2
    assert err and "Traceback" not in err


def test_help_exits_cleanly(capsys):
    assert run_command(["--help"]) == 0


def test_simulate_text():
    code, out, err = run("simulate", RESTAURANT, "--steps", "2", "--policy", "first")
    assert code == 0 and err == ""
    assert out == (
        "trace:\n"
        "  1. enter[xc=alice, xt=1]\n"
        "  2. select[d={fish}, m={fish, meat, rice}, xc=alice, xt=1]\n"
        "final marking:\n"
        "  menu: {{fish, meat, rice}}\n"
        "  orders: {(1, {fish})}\n"
        "  pending: {(alice, 1)}\n"
        "reason: deadlock\n"
        "events: 2, conditions: 6\n"
    )


def test_simulate_json():
    code, out, _ = run("simulate", RESTAURANT, "--steps", "2", "--json")
    rep = json.loads(out)
    assert rep["final_marking"]["pending"] == ["(alice, 1)"]
    [order] = rep["final_marking"]["orders"]
    assert order.startswith("(1, {")
    assert rep["trace"][0] == {"transition": "enter", "binding": {"xc": "alice", "xt": "1"}}
    assert rep["reason"] == "deadlock"
    assert (rep["events"], rep["conditions"]) == (2, 6)


def test_simulate_dot_to_stdout():
    code, out, _ = run("simulate", RESTAURANT, "--steps", "2", "--dot", "-")
    assert code == 0 and out.startswith('digraph "restaurant" {')
    assert "reason" not in out


def test_bindings():
    code, out, _ = run("bindings", RESTAURANT)
    assert (code, out) == (0, "1. enter[xc=alice, xt=1]\n")


def test_bindings_with_marking(tmp_path):
    mk = tmp_path / "m.hkt"
    mk.write_text("marking { ready: {(alice, 1)}; menu: {{rice, meat, fish}}; }\n")
    code, out, _ = run("bindings", RESTAURANT, "--marking", str(mk))
    assert code == 0 and len(out.splitlines()) == 7
    code, out, _ = run("bindings", RESTAURANT, "--marking", str(mk), "--json")
    assert len(json.loads(out)) == 7
    mk.write_text("marking { ready: {(carol, 1)}; }\n")
    code, _, err = run("bindings", RESTAURANT, "--marking", str(mk))
    assert code == 1 and "outside" in err


def test_space_json():
    code, out, err = run("space", RESTAURANT, "--max-states", "100", "--json", "-")
    g = json.loads(out)
    assert code == 0 and err == ""
    assert (len(g["nodes"]), len(g["edges"]), g["truncated"]) == (9, 8, False)


def test_space_summary_and_bound():
    code, out, _ = run("space", RESTAURANT)
    assert (code, out) == (0, "states: 9\nedges: 8\ncomplete: yes\n")
    code, out, err = run("space", RESTAURANT, "--max-states", "4")
    assert code == 0 and "complete: no" in out and "exceeds" in err
    code, _, _ = run("space", RESTAURANT, "--max-states", "4", "--strict")
    assert code == 3


def test_space_dot(tmp_path):
    dest = tmp_path / "g.dot"
    code, out, _ = run("space", RESTAURANT, "--dot", str(dest))
    text = dest.read_text()
    assert code == 0 and text.startswith('digraph "restaurant" {')
    assert text.count(" -> ") == 8
    assert 'label="enter[xc=alice, xt=1]"' in text


def test_run_exports(tmp_path):
    code, out, _ = run("run", RESTAURANT, "--steps", "2", "--causal")
    assert code == 0 and "style=dashed" in out and out.count("shape=box") == 2
    code, out, _ = run("run", RESTAURANT, "--steps", "2")
    assert out.count(" -> ") == 2
    dest = tmp_path / "r.json"
    code, out, _ = run("run", RESTAURANT, "--steps", "2", "--causal", "--dot", "-",
                       "--json", str(dest))
    assert json.loads(dest.read_text())["events"] == 2


def test_compose(tmp_path):
    dest = tmp_path / "c.hkt"
    code, out, _ = run("compose", RESTAURANT, model_path("kitchen.hkt"), "-o", str(dest))
    assert code == 0 and out == ""
    c = parse_file(str(dest))
    assert c.name == "restaurant_kitchen"
    assert c.net.has_transition("kitchen.cook")
    code, _, err = run("compose", RESTAURANT, RESTAURANT)
    assert code == 1 and "duplicate" in err


def test_fmt(tmp_path):
    code, out, _ = run("fmt", RESTAURANT)
    assert code == 0 and parse(out) == parse_file(RESTAURANT)
    copy = tmp_path / "restaurant.hkt"
    shutil.copy(RESTAURANT, copy)
    assert run("fmt", str(copy), "-w")[:2] == (0, "")
    assert copy.read_text() == out
    assert run("fmt", str(copy))[1] == out


def test_play_transcript_replays():
    code, out, _ = run("play", RESTAURANT, stdin="1\n3\nu\n4\nq\n")
    assert code == 0
    assert "  1. enter[xc=alice, xt=1]" in out
    tail = out[out.index("trace:"):]
    # binding 4 after enter: dish sets are listed {fish}, {fish, meat},
    # {fish, meat, rice}, {fish, rice}, ...
    assert "  2. select[d={fish, rice}," in tail
    assert "reason: deadlock" in tail
    # feeding the recorded choices back reproduces the final marking
    code2, out2, _ = run("play", RESTAURANT, stdin="1\n4\n")
    assert out2[out2.index("trace:"):] == tail


def test_play_edge_cases():
    code, out, _ = run("play", RESTAURANT, stdin="u\nx\n9\n1\nq\n")
    assert "nothing to undo" in out and "unknown command 'x'" in out
    assert "reason: user-stop" in out
    code, out, _ = run("play", RESTAURANT, stdin="")
    assert "trace:\n  (empty)" in out

import json
import subprocess
import sys

import pytest

from quotlab import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_laws_json(capsys):
    code, out, _ = run(capsys, "laws", "fset", "qp")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"version", "config", "entries"}
    assert [e["name"] for e in doc["entries"]] == ["fset", "qp"]
    for e in doc["entries"]:
        for c in e["checks"]:
            assert {"law", "status", "cases", "millis", "expected"} <= set(c)
            assert c["millis"] is None
    qp = {c["law"]: c["status"] for c in doc["entries"][1]["checks"]}
    assert qp["set_respect"] == "fail" and qp["map_id"] == "pass"


def test_laws_text_and_unknown(capsys):
    code, out, _ = run(capsys, "laws", "fset", "--format", "text")
    assert code == 0 and all(ln.endswith(" ok") for ln in out.splitlines())
    code, _, err = run(capsys, "laws", "nosuch")
    assert code == 2 and "unknown gallery entry" in err


def test_flags_override_config(capsys, tmp_path, monkeypatch):
    cfgfile = tmp_path / "q.cfg"
    cfgfile.write_text("# small run\nbound = 2\nuniverse = 2  # atoms\n")
    code, out, _ = run(capsys, "laws", "fset", "--config", str(cfgfile))
    assert code == 0 and json.loads(out)["config"]["bound"] == 2
    code, out, _ = run(capsys, "laws", "fset", "--config", str(cfgfile), "--bound", "1")
    assert json.loads(out)["config"]["bound"] == 1
    monkeypatch.setenv(cli.CONFIG_ENV, str(cfgfile))
    code, out, _ = run(capsys, "laws", "fset")
    assert json.loads(out)["config"]["bound"] == 2
    cfgfile.write_text("bogus = 3\n")
    code, _, err = run(capsys, "laws", "fset")
    assert code == 2 and "bogus" not in err and "expected key = value" in err
    monkeypatch.delenv(cli.CONFIG_ENV)
    code, _, _ = run(capsys, "laws", "fset", "--bound", "0")
    assert code == 2


def test_default_config_file_in_cwd(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv(cli.CONFIG_ENV, raising=False)
    monkeypatch.chdir(tmp_path)
    (tmp_path / cli.DEFAULT_CONFIG_FILE).write_text("bound = 2\n")
    code, out, _ = run(capsys, "laws", "fset")
    assert code == 0 and json.loads(out)["config"]["bound"] == 2


def test_confluence(capsys):
    code, out, _ = run(capsys, "confluence", "dlist")
    assert code == 0 and json.loads(out)["certified"] is True
    code, out, _ = run(capsys, "confluence", "dlist", "--orientation=removing")
    doc = json.loads(out)
    assert code == 1 and doc["withheld_at"] == "condition (ii)"
    assert doc["counterexample"]["x"] == "[(1,a),(1,b)]"
    assert doc["counterexample"]["step"] == ["[a,a]", "[a]"]
    code, _, err = run(capsys, "confluence", "upair")
    assert code == 2 and "no rewrite system" in err


def test_dfa(capsys, tmp_path):
    code, out, _ = run(capsys, "dfa", "(a|b)*")
    assert code == 0 and "states: 1" in out
    code, out, _ = run(capsys, "dfa", "a", "--check", "7")
    assert code == 0 and "states: 3" in out and "agrees (255 words" in out
    code, out, _ = run(capsys, "dfa", "ab", "--format", "json", "--check", "3")
    doc = json.loads(out)
    assert doc["check"]["agrees"] and len(doc["delta"]) == doc["states"] == len(doc["labels"])
    dot = tmp_path / "d.dot"
    code, _, _ = run(capsys, "dfa", "(a|b)*ab", "--format", "dot", "--out", str(dot))
    assert code == 0 and dot.read_text().startswith("digraph dfa {")
    assert run(capsys, "dfa", "((")[0] == 2
    assert run(capsys, "dfa", "a", "--alphabet", "aa")[0] == 2
    assert run(capsys, "dfa", "(a|b)*a(a|b)(a|b)", "--state-limit", "2")[0] == 1


def test_report_subset_and_fault(capsys):
    code, out, _ = run(capsys, "report", "--entries", "fset", "dup-subtype")
    assert code == 0
    doc = json.loads(out)
    fset = {c["law"]: c for c in doc["entries"][0]["checks"]}
    assert fset["theorem4"]["status"] == "pass"
    dup = {c["law"]: c["status"] for c in doc["entries"][1]["checks"]}
    assert dup["subdistributivity"] == "fail"

    code, out, _ = run(capsys, "report", "--entries", "fset", "--inject-fault", "fset")
    assert code == 1
    checks = {c["law"]: c for c in json.loads(out)["entries"][0]["checks"]}
    assert checks["map_id"]["status"] == "fail" and checks["map_id"]["expected"] == "pass"
    assert "x" in checks["map_id"]["counterexample"]

    assert run(capsys, "report", "--entries", "qp", "--inject-fault", "qp")[0] == 2
    assert run(capsys, "report", "--entries", "fset", "--inject-fault", "dlist")[0] == 2


def test_timings_opt_in(capsys):
    _, out, _ = run(capsys, "laws", "qp", "--timings")
    doc = json.loads(out)
    assert doc["config"]["timings"] is True
    assert all(c["millis"] is not None for c in doc["entries"][0]["checks"])


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "quotlab", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "0.1.0" in res.stdout
    res = subprocess.run([sys.executable, "-m", "quotlab"], capture_output=True, text=True)
    assert res.returncode == 2


@pytest.mark.parametrize("fmt", ["json", "text"])
def test_report_output_file(capsys, tmp_path, fmt):
    out = tmp_path / f"r.{fmt}"
    code, stdout, _ = run(capsys, "report", "--entries", "qp", "--format", fmt, "--out", str(out))
    assert code == 0 and stdout == "" and out.read_text()

import json
import subprocess
import sys

import pytest

from cquiver import GF, Bar, Barcode, io, sum_of_intervals
from cquiver.cli import run_cli


@pytest.fixture
def rep_file(tmp_path, q013):
    def write(*bars, name="v.json"):
        path = tmp_path / name
        path.write_text(io.dumps(sum_of_intervals(q013, [Bar.parse(b) for b in bars], GF())))
        return str(path)

    return write


def payload(capsys):
    return json.loads(capsys.readouterr().out)["payload"]


def test_validate(rep_file, capsys):
    assert run_cli(["validate", rep_file("[0, 3]")]) == 0
    assert payload(capsys)["violations"] == []


def test_schema_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "rep", "version": 1, "payload": {}}')
    assert run_cli(["validate", str(bad)]) == 2
    assert "$.payload" in capsys.readouterr().err


def test_usage_error_exit_code(rep_file):
    assert run_cli(["reflect", rep_file("[0, 3]")]) == 2
    assert run_cli(["nope"]) == 2


def test_reflect_and_decompose(rep_file, tmp_path, capsys):
    out = tmp_path / "out.json"
    assert run_cli(["reflect", rep_file("[0, 5/2]"), "--at", "1", "-o", str(out)]) == 0
    assert run_cli(["decompose", str(out)]) == 0
    bc, q = io.decode(io.Document("barcode", payload(capsys)))
    assert bc == Barcode.parse("[0, 3/2]") and q.breakpoints == (0, 2, 3)


def test_reflect_with_mirror_pairing(rep_file, tmp_path, capsys):
    out = tmp_path / "out.json"
    assert run_cli(["reflect", rep_file("[0, 5/2]"), "--at", "1", "--pairing", "mirror", "-o", str(out)]) == 0
    run_cli(["decompose", str(out)])
    assert io.decode(io.Document("barcode", payload(capsys)))[0] == Barcode.parse("{0}", "[1/2, 2)")


def test_reflect_reports_paper_b_inconsistency(rep_file, capsys):
    code = run_cli(["reflect", rep_file("[1, 3]"), "--at", "1", "--s-prime-value", "paper-b"])
    assert code == 1 and payload(capsys)["check"] == "containment"


def test_check_passes_by_default(rep_file, capsys):
    assert run_cli(["check", rep_file("[0, 5/2]", "[0, 1)"), "--at", "1"]) == 0
    report = payload(capsys)
    assert [c["name"] for c in report["checks"]] == ["membership", "lemmas", "roundtrip", "functoriality"]
    assert report["passed"]


def test_check_fails_outside_the_subcategory(rep_file, capsys):
    assert run_cli(["check", rep_file("{1}"), "--at", "1", "--membership"]) == 1
    assert not payload(capsys)["checks"][0]["passed"]


def test_check_round_trip_under_mirror_pairing_fails(rep_file, capsys):
    assert run_cli(["check", rep_file("[0, 5/2]"), "--at", "1", "--roundtrip", "--pairing", "mirror"]) == 1


def test_fuzz_is_byte_stable(tmp_path, monkeypatch):
    monkeypatch.setenv("FUZZ_SEED", "9")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli(["fuzz", "--trials", "5", "-o", str(a)]) == 0
    assert run_cli(["fuzz", "--trials", "5", "--seed", "9", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["payload"]["config"]["seed"] == 9


def test_fuzz_failures_include_a_replayable_input(tmp_path):
    out = tmp_path / "f.json"
    code = run_cli(["fuzz", "--trials", "6", "--pairing", "mirror", "--checks", "roundtrip", "-o", str(out)])
    assert code == 1
    failure = json.loads(out.read_text())["payload"]["failures"][0]
    small = io.rep_in(failure["input"])
    assert small.quiver.breakpoints[failure["at"]] is not None
    assert len(failure["bars"]) >= 1


def test_render(rep_file, tmp_path):
    out = tmp_path / "bars.svg"
    assert run_cli(["render", rep_file("[0, 3]", "{1}"), "-o", str(out)]) == 0
    assert out.read_text().startswith("<svg")


def test_module_entry_point(rep_file):
    done = subprocess.run([sys.executable, "-m", "cquiver", "validate", rep_file("[0, 3]")], capture_output=True)
    assert done.returncode == 0 and b'"passed": true' in done.stdout

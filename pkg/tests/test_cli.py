import json
import subprocess
import sys

import pytest

from locc_areas.cli import main

A = '{"lambda": ["1/2", "3/10", "1/5"]}'
B = '{"lambda": ["1/2", "1/2"]}'
T = '{"lambda": ["7/10", "1/5", "1/10"]}'
C = '{"lambda": ["1/2", "1/4", "1/4"]}'
E = '{"lambda": ["1/2", "7/20", "3/20"]}'
BAD = '{"lambda": ["1/2", "1/4"]}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_true_and_false(capsys, write_json):
    a, b = write_json("a.json", A), write_json("b.json", B)
    code, out, _ = run(capsys, "check", "--state", a, "--target", b)
    assert code == 0 and json.loads(out) == {"convertible": True}
    code, out, _ = run(capsys, "check", "--state", b, "--target", a)
    assert code == 1 and json.loads(out) == {"convertible": False}


def test_distill_output(capsys, write_json):
    code, out, _ = run(capsys, "distill", "--state", write_json("s.json", A))
    doc = json.loads(out)
    assert code == 0
    assert doc["distribution"] == {"1": "1/5", "2": "1/5", "3": "3/5"}
    assert doc["average_yield"] == 1.1509775004


def test_maxprob_output(capsys, write_json):
    code, out, _ = run(capsys, "maxprob", "--state", write_json("t.json", T), "-m", "2")
    doc = json.loads(out)
    assert code == 0
    assert (doc["p_max"], doc["r0"], doc["h_max"]) == ("3/5", 1, "3/10")
    assert doc["target"] == ["7/10", "3/10", "0/1"]


def test_convert_verify_round_trip(capsys, write_json, tmp_path):
    c, e = write_json("c.json", C), write_json("e.json", E)
    proto = tmp_path / "p.json"
    fig = tmp_path / "p.png"
    code, _, _ = run(capsys, "convert", "--state", c, "--target", e, "--out", str(proto), "--figure", str(fig))
    assert code == 0 and proto.exists() and fig.stat().st_size > 0
    code, out, _ = run(capsys, "verify", str(proto))
    doc = json.loads(out)
    assert code == 0 and doc["passed"] and doc["kind"] == "convert"


def test_verify_fails_on_tampered_file(capsys, write_json, tmp_path):
    c, e = write_json("c.json", C), write_json("e.json", E)
    proto = tmp_path / "p.json"
    run(capsys, "convert", "--state", c, "--target", e, "--out", str(proto))
    doc = json.loads(proto.read_text())
    doc["operators"]["outcomes"][0]["probability"] = "1/3"
    proto.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify", str(proto), "--format", "text")
    assert code == 1 and "FAIL" in out


def test_convert_not_convertible(capsys, write_json):
    code, _, err = run(capsys, "convert", "--state", write_json("b.json", B), "--target", write_json("a.json", A))
    assert code == 1 and "not convertible" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "--state", "{bad}", "--target", "{a}"],
        ["distill", "--state", "{missing}"],
        ["distill", "--state", "{junk}"],
        ["maxprob", "--state", "{a}"],
        ["maxprob", "--state", "{a}", "-m", "0"],
        ["maxprob", "--state", "{a}", "-m", "two"],
        ["check", "--state", "{a}"],
        ["frobnicate"],
        [],
        ["verify", "{a}"],
        ["distill", "--state", "{a}", "--tol", "-1"],
    ],
)
def test_malformed_input_exits_2(capsys, write_json, tmp_path, argv):
    files = {
        "bad": write_json("bad.json", BAD),
        "a": write_json("a.json", A),
        "junk": write_json("junk.json", "not json"),
        "missing": str(tmp_path / "nope.json"),
    }
    code, _, _ = run(capsys, *[x.format(**files) for x in argv])
    assert code == 2


def test_sum_message_on_stderr(capsys, write_json):
    code, _, err = run(capsys, "distill", "--state", write_json("bad.json", BAD))
    assert code == 2 and "sum 3/4 ≠ 1" in err


def test_render_formats(capsys, write_json, tmp_path):
    a = write_json("a.json", A)
    code, out, _ = run(capsys, "render", "--state", a)
    assert code == 0 and out.splitlines()[-1] == "123"
    code, out, _ = run(capsys, "render", "--state", a, "--format", "svg")
    assert code == 0 and out.startswith("<svg")
    code, out, _ = run(capsys, "render", "--state", a, "--format", "json")
    assert json.loads(out)["N"] == 10
    code, out, _ = run(capsys, "render", "--state", a, "--target", write_json("b.json", B))
    assert code == 0 and out.splitlines()[0] == "13."
    fig = tmp_path / "r.svg"
    code, _, _ = run(capsys, "render", "--state", a, "--figure", str(fig), "--format", "ascii")
    assert code == 0 and fig.read_text().lstrip().startswith("<?xml")


def test_text_formats_and_figures(capsys, write_json, tmp_path):
    a, t = write_json("a.json", A), write_json("t.json", T)
    code, out, _ = run(capsys, "distill", "--state", a, "--format", "text", "--figure", str(tmp_path / "d.png"))
    assert code == 0 and "m=3  p=3/5" in out and (tmp_path / "d.png").exists()
    code, out, _ = run(capsys, "maxprob", "--state", t, "-m", "2", "--format", "text", "--figure", str(tmp_path / "m.pdf"))
    assert code == 0 and "p_max = 3/5" in out and (tmp_path / "m.pdf").exists()
    code, out, _ = run(capsys, "convert", "--state", a, "--target", write_json("b.json", B), "--format", "text")
    assert code == 0 and out.startswith("Q = 5")


def test_console_script_entry_point(tmp_path):
    a = tmp_path / "a.json"
    a.write_text(A)
    proc = subprocess.run(
        [sys.executable, "-m", "locc_areas", "distill", "--state", str(a)], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["distribution"]["3"] == "3/5"

import json
import shutil
import subprocess
import sys

from symline.cli import Report, RunOptions, corpus_run, file_seed, main, solve_file


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def run_json(capsys, *argv):
    code = main([*argv, "--json", "--no-timing"])
    return code, json.loads(capsys.readouterr().out)


def test_solve_is_deterministic(capsys, corpus_dir):
    f = str(corpus_dir / "worked_scale.ode")
    code1, a = run_json(capsys, "solve", f)
    code2, b = run_json(capsys, "solve", f)
    assert code1 == code2 == 0
    assert a == b and "ms" not in a
    assert a["summary"] == "CaseAy0"


def test_two_branches(capsys, corpus_dir):
    code, doc = run_json(capsys, "solve", str(corpus_dir / "worked_quadratic.ode"))
    assert code == 0 and len(doc["branches"]) == 2
    assert all(b["verified"]["determining"] for b in doc["branches"])


def test_unsupported_degree_exits_2(tmp_path, capsys):
    f = write(tmp_path, "cubic.ode", "ode: y'^3 = x\n")
    code, doc = run_json(capsys, "solve", str(f))
    assert code == 2 and doc["error"].startswith("UnsupportedDegree")


def test_not_an_ode_exits_2(tmp_path, capsys):
    f = write(tmp_path, "flat.ode", "ode: y = x\n")
    code, doc = run_json(capsys, "solve", str(f))
    assert code == 2 and doc["error"].startswith("NotAnODE")


def test_missing_file_exits_2(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "nope.ode")]) == 2
    capsys.readouterr()


def test_expect_mismatch_exits_1(tmp_path, capsys):
    f = write(tmp_path, "wrong.ode", "ode: y' = y^2 + x\nexpect.class: CaseGeneral\n")
    assert main(["solve", str(f)]) == 1
    assert "MISMATCH" in capsys.readouterr().out


def test_empty_corpus(tmp_path, capsys):
    assert main(["corpus", str(tmp_path)]) == 0
    assert "0 files" in capsys.readouterr().out


def test_report_json_round_trip(corpus_dir):
    r = solve_file(corpus_dir / "worked_log.ode", RunOptions(timing=False))
    back = Report.from_dict(json.loads(r.to_json()))
    assert back == r and back.expect_ok


def test_corpus_summary(tmp_path, corpus_dir):
    for name in ("worked_scale.ode", "riccati_unsolved.ode"):
        shutil.copy(corpus_dir / name, tmp_path / name)
    summary, reports = corpus_run(tmp_path, RunOptions(timing=False))
    assert summary["files"] == 2 and not summary["mismatches"]
    assert summary["counts"] == {"CaseAy0": 1, "DegenerateRiccatiPath": 1}
    assert [r.seed for r in reports] == [file_seed(0, r.name) for r in reports]


def test_gen_then_corpus(tmp_path, capsys):
    assert main(["gen", "--family", "riccati-fp", "--count", "2", "--seed", "3", "--out", str(tmp_path)]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["riccati-fp_0003.ode", "riccati-fp_0004.ode"]
    assert main(["corpus", str(tmp_path), "--no-timing"]) == 0
    assert "RiccatiStep2" in capsys.readouterr().out


def test_module_entry_point(corpus_dir):
    out = subprocess.run([sys.executable, "-m", "symline", "solve", str(corpus_dir / "worked_scale.ode")],
                         capture_output=True, text=True, check=True)
    assert "CaseAy0" in out.stdout

import json
from pathlib import Path

import pytest

from tomei.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_actions_counts(capsys):
    for label, n in [("A2", 2), ("G2", 4), ("B3", 6)]:
        code, out = run(capsys, "actions", label, "--format", "json")
        assert code == 0
        assert json.loads(out.out)["count"] == n


def test_actions_text_flags(capsys):
    code, out = run(capsys, "actions", "--diagram", "A2")
    lines = out.out.splitlines()
    assert code == 0 and len(lines) == 4
    assert lines[2].split() == ["e1=+", "yes", "no", "yes", "yes"]


def test_check_passes(capsys):
    code, out = run(capsys, "check", "A2", "--marking", "standard")
    assert code == 0 and "1/1 audits pass" in out.out
    code, out = run(capsys, "check", "A2", "--marking", "trivial", "--format", "json")
    assert code == 0 and json.loads(out.out)["orientable"] is True


def test_check_all_markings_a3(capsys):
    code, out = run(capsys, "check", "A3", "--all-markings", "--format", "json")
    reports = json.loads(out.out)
    assert len(reports) == 4
    assert [r["passed"] for r in reports] == [True, False, False, True]
    assert code == 1
    bad = reports[1]["theorem_checks"]["relations"]
    assert bad["pass"] is False and bad["witness"]


def test_check_is_deterministic(capsys):
    outs = [run(capsys, "check", "B2", "--all-markings", "--format", "json")[1].out for _ in range(2)]
    assert outs[0] == outs[1]


def test_complex_golden(capsys, tmp_path):
    out = tmp_path / "a2.json"
    assert main(["complex", "A2", "--marking", "standard", "--out", str(out)]) == 0
    assert json.loads(out.read_text()) == json.loads((GOLDEN / "A2_standard.json").read_text())


def test_homology_json(capsys):
    code, out = run(capsys, "homology", "A2", "--marking", "standard", "--format", "json")
    data = json.loads(out.out)
    assert code == 0
    assert data["homology_Z"] == [{"free": 1, "torsion": []}, {"free": 3, "torsion": [2]}, {"free": 0, "torsion": []}]


def test_unstable(capsys):
    code, out = run(capsys, "unstable", "A2", "--marking", "standard", "--w", "1", "--format", "json")
    row = json.loads(out.out)["unstable"][0]
    assert code == 0 and row["cycle"] and row["closure_betti_mod2"] == [1, 1] == row["levi_betti_mod2"]


def test_flow(capsys, tmp_path):
    code, out = run(capsys, "flow", "--lambda", "1,0,-1", "--signs", "++")
    data = json.loads(out.out)
    assert code == 0 and data["limit_permutation"] == [1, 2, 3] and data["monotone"]
    code, out2 = run(capsys, "flow", "--lambda", "1,0,-1", "--signs", "++")
    assert out.out == out2.out
    prefix = tmp_path / "run"
    assert main(["flow", "--lambda", "1,0,-1", "--signs", "+-", "--out", str(prefix)]) == 0
    csv_text = (tmp_path / "run.csv").read_text().splitlines()
    assert csv_text[0] == "t,a1,a2,a3,b1,b2,f,drift"
    assert len(csv_text) == 602
    assert main(["flow", "--lambda", "1,0,-1", "--signs", "++", "--out", str(tmp_path / "pp")]) == 0
    a_pm = [r.split(",")[1:4] for r in csv_text[1:]]
    a_pp = [r.split(",")[1:4] for r in (tmp_path / "pp.csv").read_text().splitlines()[1:]]
    assert a_pm == a_pp


@pytest.mark.parametrize(
    "argv",
    [
        ["flow", "--lambda", "1,1,-2"],
        ["actions", "Q3"],
        ["check", "B2", "--marking", "e1=--"],
        ["homology", "A2", "--marking", "e1=x"],
        ["check", "A5"],
        ["flow", "--lambda", "1,0,-1", "--signs", "+"],
        ["unstable", "A3", "--marking", "e1=+;e2=-"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err

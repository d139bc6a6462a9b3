import json

import pytest

from seifert_floer import __version__
from seifert_floer.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_version_string():
    assert __version__.count(".") == 2


def test_classify_table(capsys):
    code, out, _ = run(capsys, "classify", "Surgery(T(3,4), 1/4)", "--format", "table")
    assert code == 0
    assert "structures: 16" in out and "twisting numbers: -7, -223" in out


def test_classify_negated_sigma_and_csv(capsys):
    code, out, _ = run(capsys, "classify", "-Sigma(3,4,47)", "--format", "csv")
    assert code == 0
    assert len(out.strip().splitlines()) == 17


def test_classify_json_deterministic(capsys):
    _, first, _ = run(capsys, "classify", "M(-2; 1/2,1/2,4/7,6/11)", "--format", "json")
    _, second, _ = run(capsys, "classify", "M(-2; 1/2,1/2,4/7,6/11)", "--format", "json", "--parallel", "2")
    assert first == second
    assert len(json.loads(first)["structures"]) == 26


def test_lspace(capsys):
    code, out, _ = run(capsys, "lspace", "-Sigma(2,3,5)")
    assert code == 0 and "L-space: yes" in out
    _, out, _ = run(capsys, "lspace", "-Sigma(3,4,47)")
    assert "L-space: no" in out


def test_twist_certificates(capsys):
    code, out, _ = run(capsys, "twist", "M(-2; 1/2,1/2,4/7,6/11)", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["twisting_set"] == [-1, -3, -5]
    assert data["certificates"] == [[3, [2, 2, 2, 2]], [5, [3, 3, 3, 3]]]
    _, out, _ = run(capsys, "twist", "Surgery(T(2,3), 0)", "--window", "3")
    assert "-5, -11, -17 ... (infinite family, first 3 shown)" in out


def test_graph_hf_tau(capsys):
    code, out, _ = run(capsys, "graph", "-Sigma(3,4,47)")
    assert code == 0 and "type A" in out and "(-1; [-2,-2]; [-4]; [-12,-4])" in out
    code, out, _ = run(capsys, "hf", "M(-1; 1/2, 1/3, 1/6)", "--box")
    # The class is listed by its least member, the conjugate of (1,0,-1,-4).
    assert code == 0 and "full paths ending correctly: 1" in out and "(-1,0,1,4)  M -1/2" in out
    code, out, _ = run(capsys, "tau", "Sigma(2,3,5)", "--vector=0,0,0,0,0,0,0,0")
    assert code == 0 and "tau (graph side) 15" in out
    code, out, _ = run(capsys, "hf", "-Sigma(3,4,47)", "--format", "json")
    assert len(json.loads(out)["classes"]) == 19


def test_check_command(capsys):
    code, out, _ = run(capsys, "check", "--cases", "5", "--seed", "3", "--max-box", "3000")
    assert code == 0 and "all checks passed" in out


@pytest.mark.parametrize("argv, code", [
    (["classify", "M(1;"], 2),
    (["classify", "Sigma(2,4,5)"], 2),
    (["classify", "M(0; 1/2, 1/3)"], 3),
    (["classify", "Surgery(T(3,4), 12)"], 3),
    (["tau", "M(-1; 1/2, 1/3, 1/6)"], 3),
    (["tau", "-Sigma(3,4,47)", "--class", "99"], 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_window_env_rejected(capsys, monkeypatch):
    monkeypatch.setenv("SEIFERT_FLOER_WINDOW", "-4")
    assert run(capsys, "twist", "Sigma(2,3,5)")[0] == 2


def test_consistency_exit_code(capsys, monkeypatch):
    from seifert_floer import cli
    from seifert_floer.errors import ConsistencyError

    def broken(args):
        raise ConsistencyError("two algorithms disagree", via_heights=[-7], ghiggini_massot=[-7, -223])

    monkeypatch.setitem(cli.COMMANDS, "classify", broken)
    code, _, err = run(capsys, "classify", "Sigma(2,3,5)")
    assert code == 4 and "-223" in err

import json
from pathlib import Path

import pytest

from jetlift.cli import SCHEMA, InputError, main, parse_field_text, run

INPUTS = Path(__file__).resolve().parent.parent / "demos" / "inputs"


def inp(name):
    return str(INPUTS / name)


def report(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None


@pytest.mark.parametrize("argv", [
    ["bracket", "pair.vf"],
    ["flow", "--order", "3", "pair.vf"],
    ["diff-formula", "--order", "1", "equal_jets.vf"],
    ["admissible", "--order", "2", "darboux_setup.json", "ham_seed.vf"],
    ["extend", "--order", "1", "darboux_setup.json", "ham_seed.vf"],
    ["lift", "lift_symplectic.json"],
    ["lift", "lift_foliation.json"],
    ["cech", "cech_symplectic.json"],
    ["ham", "hamiltonians.vf"],
    ["extend-ham", "worked_extension.vf"],
    ["perp-check", "perp_pair.vf"],
    ["omega-check", "--order", "4", "omega.vf"],
    ["tangency", "foliation.vf"],
    ["fol-check", "foliation.vf"],
    ["velocity-check", "--order", "4", "velocity.vf"],
])
def test_subcommands_succeed(capsys, argv):
    cmd, *rest = argv
    rest = [inp(a) if not a.startswith("-") and not a.isdigit() else a for a in rest]
    code, rep = report(capsys, cmd, *rest)
    assert code == 0
    assert rep["schema"] == SCHEMA and rep["subcommand"] == cmd and rep["ok"]
    assert "timing" not in rep


def test_flow_jet(capsys):
    _, rep = report(capsys, "flow", "--order", "2", inp("pair.vf"))
    assert rep["results"]["jet"]["coeffs"] == [["x", "y", "0"], ["y", "0", "1/2*x"]]


def test_worked_extension(capsys):
    _, rep = report(capsys, "extend-ham", inp("worked_extension.vf"))
    assert rep["results"]["G"] == "-x*y + y"
    assert rep["results"]["X_G"] == "(-x + 1, y)"


def test_tangency(capsys):
    _, rep = report(capsys, "tangency", inp("foliation.vf"))
    assert rep["results"]["tangency_ideal"] == ["x"]


def test_byte_identical_reports(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["lift", inp("lift_foliation.json"), "--json", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_timing_is_opt_in():
    rep = run("bracket", [inp("pair.vf")], timing=True)
    assert "seconds" in rep.to_json()["timing"]


def test_digest_tracks_flags():
    a = run("flow", [inp("pair.vf")], order=2).digest
    b = run("flow", [inp("pair.vf")], order=3).digest
    assert a != b


def test_verify_paper_is_deterministic():
    one = run("verify-paper", seed=5, cases=1).dumps()
    two = run("verify-paper", seed=5, cases=1, jobs=2).dumps()
    assert one == two
    res = json.loads(one)["results"]
    assert res["failures"] == 0 and res["inconclusive"] == 0


def test_failed_verdict_exits_one(tmp_path, capsys):
    # X_xy + t*X_x is Hamiltonian but its first defect (0, -1) is not in Perp along y = 0
    f = tmp_path / "seed.vf"
    f.write_text("coords: x y\nfield: (x, -y - t)\n")
    code, rep = report(capsys, "admissible", inp("darboux_setup.json"), str(f))
    assert code == 1 and not rep["ok"]
    assert rep["results"]["verdicts"][0]["verdict"] == "non-member"


def test_hypothesis_error_exits_two(tmp_path, capsys):
    f = tmp_path / "bad.vf"
    f.write_text("coords: x y\nvanishing: x\nfield: (x, -y)\nfield: (x + y, y)\n")
    assert main(["diff-formula", str(f)]) == 2
    assert "HypothesisError" in capsys.readouterr().err


def test_input_errors(tmp_path, capsys):
    f = tmp_path / "broken.vf"
    f.write_text("coords: x y\nfield: (x +, y)\n")
    assert main(["bracket", str(f)]) == 2
    err = capsys.readouterr().err
    assert "broken.vf:2" in err


def test_field_file_parser():
    ff = parse_field_text("# c\ncoords: x, y\ntime: s\nvanishing: y\nfield: (s, x)  # trailing\n")
    assert ff.chart.time == "s" and ff.vanishing == ["y"] and len(ff.fields) == 1
    with pytest.raises(InputError, match="repeated"):
        parse_field_text("coords: x\ncoords: y\n")
    with pytest.raises(InputError, match="components"):
        parse_field_text("coords: x y\nfield: (x)\n")

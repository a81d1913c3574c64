import subprocess
import sys

import pytest

from e2p.cli import main

from corpus import CLI, DATA

EM_EVIDENCE = ["em_inl", "em_inr", "em_lam", "em_pair", "em_stuck"]


def run(*argv):
    return main([str(a) for a in argv])


def test_prove_identity(tmp_path, capsys):
    out = tmp_path / "id.proof"
    assert run("prove", CLI / "id.fol", CLI / "id.evd", "--out", out) == 0
    assert "(RightImp v0\n  (Axiom v0))" in out.read_text()
    assert run("check", out) == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_prove_nonex_with_trace(tmp_path, capsys):
    out = tmp_path / "nonex.proof"
    assert run("prove", CLI / "nonex.fol", CLI / "nonex.evd", "--trace", "--out", out) == 0
    assert capsys.readouterr().err.splitlines() == (CLI / "nonex.trace").read_text().splitlines()
    assert run("check", out) == 0


def test_prove_maximal(tmp_path):
    out = tmp_path / "max.proof"
    assert run("prove", CLI / "maximal.fol", CLI / "maximal.evd", "--fuel", 100000, "--out", out) == 0
    assert run("check", out) == 0


@pytest.mark.parametrize("evd", EM_EVIDENCE)
def test_excluded_middle(evd, capsys):
    assert run("prove", CLI / "em.fol", CLI / f"{evd}.evd") == 2
    assert run("eval", CLI / "em.fol", "--evidence", CLI / f"{evd}.evd") == 2
    assert "counterexample: domain=" in capsys.readouterr().err


def test_omega_exhausts_fuel(capsys):
    assert run("prove", CLI / "id.fol", CLI / "omega.evd", "--fuel", 1000) == 3
    assert "fuel exhausted" in capsys.readouterr().err


def test_fuel_from_environment(monkeypatch):
    monkeypatch.setenv("E2P_FUEL", "500")
    assert run("prove", CLI / "id.fol", CLI / "omega.evd") == 3
    monkeypatch.setenv("E2P_FUEL", "lots")
    assert run("prove", CLI / "id.fol", CLI / "id.evd") == 1


def test_extract_prove_check_roundtrip(tmp_path):
    for path in sorted((DATA / "corpus").glob("*.proof")):
        evd, fol, out = tmp_path / "e.evd", tmp_path / "g.fol", tmp_path / "p.proof"
        assert run("extract", path, "--out", evd) == 0
        fol.write_text(path.read_text().splitlines()[0].removeprefix("goal:"))
        assert run("prove", fol, evd, "--out", out) == 0, path.name
        assert run("check", out) == 0, path.name


def test_check_rejects_bad_proof(tmp_path):
    bad = tmp_path / "bad.proof"
    bad.write_text("goal: A => A\n(Axiom h0)\n")
    assert run("check", bad) == 2


def test_intuitionistic_mode(tmp_path, capsys):
    fol, evd, out = tmp_path / "g.fol", tmp_path / "e.evd", tmp_path / "p.proof"
    fol.write_text("False => P")
    evd.write_text("\\a. inr a")
    assert run("prove", fol, evd) == 1  # minimal mode refuses False
    assert run("prove", fol, evd, "--logic", "intuitionistic", "--out", out) == 0
    assert run("check", out, "--logic", "intuitionistic") == 0
    assert run("check", out) == 2


def test_translate(tmp_path, capsys):
    fol = tmp_path / "g.fol"
    fol.write_text("False => P")
    assert run("translate", fol, "--atom", "A") == 0
    assert capsys.readouterr().out.strip() == "A => P \\/ A"


def test_eval_with_structure(capsys):
    assert run("eval", CLI / "em.fol", "--structure", "domain=1; P=0") == 0
    assert capsys.readouterr().out.strip() == "|M(phi)| = 1"
    assert run("eval", CLI / "em.fol", "--evidence", CLI / "em_inl.evd", "--structure", "domain=1; P=0") == 2


def test_normalize(tmp_path, capsys):
    t = tmp_path / "t.evd"
    t.write_text("fst <\\x. x, v>")
    assert run("normalize", t) == 0
    assert capsys.readouterr().out.strip() == "\\x. x"


def test_bad_input_exit_codes(tmp_path):
    bad = tmp_path / "bad.fol"
    bad.write_text("A => ")
    assert run("prove", bad, CLI / "id.evd") == 1
    assert run("prove", tmp_path / "missing.fol", CLI / "id.evd") == 1
    open_ = tmp_path / "open.fol"
    open_.write_text("P(x)")
    assert run("prove", open_, CLI / "id.evd") == 1


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "e2p.cli", "prove", str(CLI / "id.fol"), str(CLI / "id.evd")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("goal: A => A\n")

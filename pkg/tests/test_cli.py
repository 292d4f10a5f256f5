import json
import subprocess
import sys

import pytest

from semicomp.cli import main, run

FR0 = ["--space", "friedmann", "--params", '{"C": 0}']


def _json(text):
    doc = json.loads(text)
    assert doc["schema"] == "semicomp/v1"
    return doc


def test_realize_examples():
    code, text = run(["realize", "--triple", "3,4,5", "--K", "0"])
    tri = _json(text)["triangle"]
    assert code == 0 and tri["space"] == "riemannian"
    assert tri["included_angle"] == pytest.approx(0.0, abs=1e-12)

    code, text = run(["realize", "--triple", "2,1,1", "--K", "0", "--prefer", "lorentz"])
    tri = _json(text)["triangle"]
    assert code == 0 and tri["space"] == "lorentz"

    code, text = run(["realize", "--triple", "3,4,5", "--K", "1"])
    assert code == 2 and _json(text)["error"] == "SizeBoundViolation"


def test_usage_errors():
    assert run(["realize", "--triple", "3,4", "--K", "0"])[0] == 2
    assert run(["nonsense"])[0] == 2
    assert run(["compare", "--space", "nowhere"])[0] == 2


def test_conics_examples():
    code, text = run(["conics", "0,0,0,0,0,1"])
    doc = _json(text)
    assert code == 0 and doc["report"]["case"] == 3
    iv = doc["report"]["bound_interval"]
    assert (iv["lo"], iv["hi"]) == pytest.approx((0.0, 1.0))
    assert doc["gap"]["gap"] == pytest.approx(1.0)
    code, text = run(["conics", "0,1,0,0,0,0"])
    assert code == 1 and _json(text)["report"]["case"] == 2


def test_conics_csv_header():
    code, text = run(["conics", "0,0,0,0,0,1", "--out", "csv"])
    lines = text.splitlines()
    assert lines[0] == "# semicomp-csv v1 conics"
    assert json.loads(lines[-1][2:])["schema"] == "semicomp/v1"


@pytest.mark.parametrize("args, lo, hi", [
    (["--C", "1", "--E", "1"], -1.125, 2.25),
    (["--C", "1", "--E", "3"], -0.125, 0.25),
    (["--C", "0"], 0.0, 0.0),
])
def test_rw_friedmann(args, lo, hi):
    code, text = run(["rw"] + args)
    iv = _json(text)["interval"]
    assert code == 0
    assert (iv["lo"], iv["hi"]) == pytest.approx((lo, hi), rel=1e-6, abs=1e-12)
    if args[1] == "0":
        assert not iv["lo_attained"] and not iv["hi_attained"]


def test_rw_de_sitter_and_csv():
    code, text = run(["rw", "--model", "space", "--space", "de_sitter"])
    iv = _json(text)["interval"]
    assert code == 0 and (iv["lo"], iv["hi"]) == pytest.approx((1.0, 1.0))
    code, text = run(["rw", "--C", "0", "--out", "csv", "--points", "5"])
    lines = text.splitlines()
    assert lines[0] == "# semicomp-csv v1 rw"
    assert lines[1] == "t,K_minus,K_plus,rho,p"
    assert len(lines) == 2 + 5 + 1


def test_riccati_flat_and_friedmann():
    code, text = run(["riccati", "--space", "minkowski", "--K", "0", "--out", "csv"])
    rows = [l.split(",") for l in text.splitlines()[2:-1]]
    assert code == 0 and rows
    assert max(float(r[1]) for r in rows) <= 1e-12
    code, text = run(["riccati"] + FR0 + ["--K", "0", "--seed", "3"])
    doc = _json(text)
    assert code == 0
    assert min(r[2] for r in doc["table"]["rows"]) >= -1e-6


def test_compare_single_triangle():
    code, text = run(["compare", "--space", "minkowski", "--K", "0",
                      "--vertices", "0,0,0,0;0.1,0.3,0,0;0,0.2,0.3,0.1"])
    assert code == 0 and _json(text)["report"]["holds"]


def test_compare_finds_violation_in_minkowski():
    code, text = run(["compare", "--space", "minkowski", "--K", "0.1", "--samples", "1000"])
    doc = _json(text)
    assert code == 1 and doc["witness"] is not None


def test_compare_is_deterministic(monkeypatch):
    argv = ["compare", "--space", "de_sitter", "--K", "1", "--samples", "3", "--seed", "7"]
    monkeypatch.setenv("SEMICOMP_THREADS", "1")
    a = run(argv)
    b = run(argv)
    monkeypatch.setenv("SEMICOMP_THREADS", "2")
    c = run(argv)
    assert a == b == c
    assert a[0] == 0
    assert all(abs(m) <= 1e-6 for m in _json(a[1])["margins"])


def test_main_streams(capsys):
    assert main(["conics", "0,0,0,0,0,1"]) == 0
    assert '"case": 3' in capsys.readouterr().out
    assert main(["realize", "--triple", "3,4,5", "--K", "1"]) == 2
    assert "SizeBoundViolation" in capsys.readouterr().err


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "semicomp.cli", "conics", "0,0,0,0,0,1"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["report"]["case"] == 3

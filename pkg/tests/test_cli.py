import json
from pathlib import Path

import pytest

from crgate.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, EXIT_STRICT, main
from crgate.sweep import parse_csv, parse_json

DATA = Path(__file__).parent / "data"
OMEGA = ["--set", "axis1.name=Omega", "--set", "axis1.start=0", "--set", "axis1.stop=0.02",
         "--set", "axis1.points=2"]


def test_sweep_to_stdout(capsys):
    assert main(["sweep", *OMEGA, "--levels", "4", "--method", "pert", "--order", "2"]) == EXIT_OK
    rows = parse_csv(capsys.readouterr().out)
    assert [r["order"] for r in rows] == [2, 2] and rows[1]["ZX"] < 0


def test_sweep_to_file_matches_golden(tmp_path):
    out = tmp_path / "g.json"
    rc = main(["sweep", "--config", str(DATA / "golden_2d.cfg"), "--out", str(out),
               "--threads", "4"])
    assert rc == EXIT_OK
    meta, recs = parse_json(out.read_text())
    _, golden = parse_json((DATA / "golden_2d.json").read_text())
    assert meta["config"] == parse_json((DATA / "golden_2d.json").read_text())[0]["config"]
    assert [r["status"] for r in recs] == [r["status"] for r in golden]


def test_strict_exit_code(capsys):
    pole = ["--set", "axis1.name=Delta", "--set", "axis1.start=0.2", "--set", "axis1.stop=0.33",
            "--set", "axis1.points=2", "--set", "method.gap_tol=1e-6"]
    assert main(["sweep", *pole]) == EXIT_OK
    assert main(["sweep", *pole, "--strict"]) == EXIT_STRICT
    assert main(["sweep", *OMEGA, "--strict"]) == EXIT_OK
    assert "pole" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["sweep", "--set", "axis1.colour=red"],
    ["sweep"],
    ["sweep", "--config", "/nonexistent.cfg"],
    ["sweep", *OMEGA, "--format", "xml"],
    ["sweep", *OMEGA, "--order", "0", "--method", "pert"],
    ["frobnicate"],
])
def test_config_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(main(argv))
    assert info.value.code == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_config_error_names_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("axis1.name = Omega\naxis1.start = 0\naxis1.stop = 1\naxis1.points = one\n")
    assert main(["sweep", "--config", str(cfg)]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "line 4" in err and "axis1.points" in err


def test_unwritable_output(tmp_path, capsys):
    bad = tmp_path / "nope" / "x.csv"
    assert main(["sweep", *OMEGA, "--out", str(bad)]) == EXIT_FAIL
    assert str(bad) in capsys.readouterr().err


def test_point(capsys):
    assert main(["point", "--omega", "0.02", "--format", "json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    (rec,) = doc["records"]
    assert rec["ZX"] == pytest.approx(-0.949894663, abs=1e-6)
    assert main(["point", "--delta", "0.33", "--set", "method.gap_tol=1e-6"]) == EXIT_FAIL
    assert parse_csv(capsys.readouterr().out)[0]["status"] == "pole"


def test_validate(capsys):
    assert main(["validate"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert len(out) >= 8 and all(line.startswith("PASS") for line in out)


def test_jcal(capsys):
    assert main(["jcal", "--xi", "2.77e-4"]) == EXIT_OK
    assert "J = 0.00380244" in capsys.readouterr().out
    assert main(["jcal", "--xi=-2.77e-4"]) == EXIT_CONFIG
    assert main(["jcal", "--xi", "2.77e-4", "--detuning", "0.33"]) == EXIT_CONFIG

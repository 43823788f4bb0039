import subprocess
import sys

import pytest

from codedmm.cli import main
from codedmm.experiments import read_csv

CFG = """
d1 = 8
d2 = 4
d3 = 8
m = 2
trials = 30
seed = 5
schemes = setwise:optimal:1-2, independent:uniform:1
"""


@pytest.fixture
def cfg_path(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(CFG)
    return path


def test_run_and_summarize(cfg_path, tmp_path, capsys):
    out = tmp_path / "r.csv"
    agg = tmp_path / "agg.dat"
    assert main(["run", "--config", str(cfg_path), "--out", str(out), "--aggregate", str(agg)]) == 0
    assert "setwise/optimal" in capsys.readouterr().out
    assert len(read_csv(out)) == 90
    assert agg.exists()
    assert main(["summarize", str(out)]) == 0
    assert "independent/uniform" in capsys.readouterr().out


def test_flags_override_config(cfg_path, tmp_path):
    out = tmp_path / "r.csv"
    assert main(["run", "--config", str(cfg_path), "--trials", "4", "--seed", "9", "--out", str(out), "-q"]) == 0
    assert len(read_csv(out)) == 12
    assert main(["run", "--config", str(cfg_path), "--set", "trials=2", "--out", str(out), "-q"]) == 0
    assert len(read_csv(out)) == 6


def test_validation_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text(CFG.replace("m = 2", "m = 3"))
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "r.csv")]) != 0
    assert "m:" in capsys.readouterr().err


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("this is not a config\n")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "r.csv")]) != 0
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) != 0


def test_summarize_bad_file(tmp_path):
    bad = tmp_path / "x.csv"
    bad.write_text("nope\n")
    assert main(["summarize", str(bad)]) != 0


def test_console_entry_point(cfg_path, tmp_path):
    out = tmp_path / "r.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "codedmm", "run", "--config", str(cfg_path), "--out", str(out), "-q"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().startswith("trial,scheme,dist,s,k")
    bad = subprocess.run([sys.executable, "-m", "codedmm", "run", "--config", str(tmp_path / "nope")])
    assert bad.returncode != 0

import csv
import json
import subprocess
import sys

import pytest

from helpers import CASE_STUDY, make
from pas_opt.cli import main
from pas_opt.generate import random_instance
from pas_opt.instance import write_instance_dir


def run(*argv):
    return main([str(a) for a in argv])


def rows(path):
    return list(csv.reader(path.read_text().splitlines()))


def test_validate(tmp_path, capsys):
    assert run("validate", "table1") == 0
    assert "OK" in capsys.readouterr().out
    write_instance_dir(make([(2, 0)] * 3, 2, [0, 0]), tmp_path / "tight")
    assert run("validate", tmp_path / "tight") == 1
    assert "Σ freq = 6 > |T|·|S| = 4" in capsys.readouterr().out
    assert run("validate", tmp_path / "missing") == 2


def test_solve_defaults_and_output(tmp_path):
    assert run("solve", "table1", "--out", tmp_path) == 0
    doc = json.loads((tmp_path / "solution.json").read_text())
    assert doc["alpha"] == 0.5
    b = doc["breakdown"]
    assert abs(b["fo"] - b["w1"] - b["w2"]) < 1e-9
    assert doc["stats"]["proven_optimal"] and doc["stats"]["seconds"] == 0.0
    man = json.loads((tmp_path / "run_manifest.json").read_text())
    assert man["command"] == "solve" and man["outputs"] == ["solution.json"] and man["seed"] == 0


def test_alpha_out_of_range_is_a_usage_error(tmp_path, capsys):
    assert run("solve", "table1", "--alpha", "1.5", "--out", tmp_path) == 2
    assert not (tmp_path / "solution.json").exists()
    assert run("sweep", "table1", "--grid", "0,2", "--out", tmp_path) == 2
    assert run("sweep", "table1", "--grid", "0", "--step", "0.5", "--out", tmp_path) == 2


def test_solve_is_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert run("solve", "table1", "--alpha", "0.25", "--out", tmp_path / d) == 0
    assert (tmp_path / "a/solution.json").read_bytes() == (tmp_path / "b/solution.json").read_bytes()


def test_sweep_default_and_step(tmp_path):
    assert run("sweep", "table1", "--out", tmp_path / "d") == 0
    r = rows(tmp_path / "d/calibration.csv")
    assert len(r) == 6 and [x[0] for x in r[1:]] == ["0.0000", "0.2500", "0.5000", "0.7500", "1.0000"]
    for x in r[1:]:
        assert abs(float(x[1]) - float(x[4]) - float(x[5])) < 1e-9
    assert len(list((tmp_path / "d/solutions").glob("alpha-*.json"))) == 5
    assert run("sweep", "table1", "--step", "0.5", "--out", tmp_path / "s") == 0
    assert len(rows(tmp_path / "s/calibration.csv")) == 4


def test_report_and_compare(tmp_path):
    assert run("sweep", CASE_STUDY, "--out", tmp_path) == 0
    sols = sorted((tmp_path / "solutions").glob("*.json"))
    assert run("report", CASE_STUDY, *sols, "--out", tmp_path / "r") == 0
    heat = rows(tmp_path / "r/heatmap.csv")
    assert heat[0] == ["floor", "0", "0.25", "0.5", "0.75", "1"]
    assert not (tmp_path / "r/comparison.txt").exists()
    usage = rows(tmp_path / "r/usage.csv")
    assert usage[0] == ["room", "meetings", "used"] and len(usage) == 32
    assert sum(int(x[1]) for x in usage[1:]) == 118

    base = CASE_STUDY / "baseline.csv"
    assert run("report", CASE_STUDY, sols[2], "--baseline", base, "--out", tmp_path / "rb") == 0
    assert "rooms" in (tmp_path / "rb/comparison.txt").read_text()
    assert run("compare", CASE_STUDY, sols[2], "--baseline", base, "--out", tmp_path / "c") == 0
    text = (tmp_path / "c/comparison.txt").read_text()
    assert text == (tmp_path / "rb/comparison.txt").read_text()


def test_mismatched_ids_exit_1(tmp_path):
    assert run("solve", "table1", "--out", tmp_path) == 0
    assert run("report", CASE_STUDY, tmp_path / "solution.json", "--out", tmp_path / "r") == 1
    (tmp_path / "bad.json").write_text("{not json")
    assert run("report", "table1", tmp_path / "bad.json", "--out", tmp_path / "r") == 1


def test_limit_hit_exits_3(tmp_path):
    write_instance_dir(random_instance(14, max_disciplines=8, max_slots=4, max_rooms=5), tmp_path / "inst")
    assert run("solve", tmp_path / "inst", "--max-nodes", "2", "--out", tmp_path) == 3
    doc = json.loads((tmp_path / "solution.json").read_text())
    assert doc["stats"]["proven_optimal"] is False
    assert doc["stats"]["bound"] <= doc["breakdown"]["fo"]


def test_oracle(tmp_path):
    write_instance_dir(make([(1, 1), (2, 0)], 2, [0, 3]), tmp_path / "tiny")
    assert run("oracle", tmp_path / "tiny", "--alpha", "1", "--out", tmp_path) == 0
    assert json.loads((tmp_path / "solution.json").read_text())["breakdown"]["obj2"] == 0
    assert run("oracle", "case_study", "--cell-limit", "10", "--out", tmp_path) == 1


@pytest.mark.parametrize("level,code", [("debug", 0), ("INFO", 0), ("loud", 2)])
def test_log_level_variable(monkeypatch, level, code):
    monkeypatch.setenv("PAS_OPT_LOG", level)
    assert run("validate", "table1") == code


def test_module_entry_point(tmp_path):
    p = subprocess.run([sys.executable, "-m", "pas_opt", "validate", "table1"], capture_output=True, text=True)
    assert p.returncode == 0 and "OK" in p.stdout
    p = subprocess.run([sys.executable, "-m", "pas_opt", "--version"], capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.strip().endswith("0.1.0")

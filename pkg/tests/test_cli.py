import os

import pytest

from collisim import cli
from collisim.lindblad import NumericalValidationError


def run_cli(args):
    return cli.main(args)


def test_crosscheck_writes_csv(tmp_path):
    out = tmp_path / "cc.csv"
    code = run_cli(["crosscheck", "--out", str(out), "--svg", "--override", "schedule.count=2"])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "t_ns,trace_distance"
    assert len(lines) == 4
    assert (tmp_path / "cc.svg").exists()


def test_sweep_with_figure(tmp_path):
    out = tmp_path / "sweep.csv"
    code = run_cli(
        [
            "sweep",
            "--out",
            str(out),
            "--svg",
            "--override",
            "sweep.points=2",
            "--override",
            "schedule.count=2",
            "--override",
            "sweep.h_b_min=0.9",
            "--override",
            "sweep.h_b_max=1.1",
        ]
    )
    assert code == 0
    assert out.exists()
    assert (tmp_path / "sweep.svg").exists()


def test_analyze_writes_report(tmp_path, capsys):
    out = tmp_path / "report.txt"
    code = run_cli(["analyze", "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert text.startswith("uniqueness analysis")
    assert text in capsys.readouterr().out


def test_config_file_and_override(tmp_path):
    cfg_file = tmp_path / "cc.cfg"
    cfg_file.write_text("[experiment]\nkind = crosscheck\n\n[schedule]\ncount = 2\n")
    out = tmp_path / "cc.csv"
    code = run_cli(
        ["crosscheck", "--config", str(cfg_file), "--out", str(out), "--override", "schedule.count=1"]
    )
    assert code == 0
    assert len(out.read_text().strip().splitlines()) == 3


def test_wrong_kind_config_is_exit_2(tmp_path):
    cfg_file = tmp_path / "sweep.cfg"
    cfg_file.write_text("[experiment]\nkind = sweep\n")
    assert run_cli(["crosscheck", "--config", str(cfg_file)]) == 2


def test_bad_override_is_exit_2(tmp_path):
    assert run_cli(["sweep", "--out", str(tmp_path / "x.csv"), "--override", "nope=1"]) == 2


def test_numerical_abort_is_exit_3(tmp_path, monkeypatch):
    def boom(cfg, threads=1):
        raise NumericalValidationError("trace gone")

    monkeypatch.setattr(cli.experiments, "run_sweep", boom)
    assert run_cli(["sweep", "--out", str(tmp_path / "x.csv")]) == 3


def test_ising2_cli_smoke(tmp_path):
    out = tmp_path / "ising2.csv"
    code = run_cli(["ising2", "--out", str(out), "--svg", "--override", "schedule.count=2"])
    assert code == 0
    header = out.read_text().splitlines()[0]
    assert header == "t_ns,label,fidelity,trace,purity,p0,p1,p2,p3"
    assert (tmp_path / "ising2.svg").exists()


def test_xy_cli_smoke(tmp_path):
    out = tmp_path / "xy.csv"
    code = run_cli(
        [
            "xy",
            "--out",
            str(out),
            "--override",
            "schedule.count=2",
            "--override",
            "initial.states=thermal:100",
            "--override",
            "experiment.engines=collision",
        ]
    )
    assert code == 0
    body = out.read_text().strip().splitlines()
    assert len(body) == 1 + 3
    assert "thermal:100/collision" in body[1]

import filecmp
import os

import pytest

from riccati_pde import cli
from riccati_pde.errors import NearSingular
from riccati_pde.scenarios import DEFAULTS, ScenarioConfig


def test_defaults_reproduce_example_parameters():
    assert DEFAULTS == {
        "rd": (20.0, 128, 0.5, 1e-3),
        "kdv": (40.0, 256, 1.0, 1e-4),
        "nls": (20.0, 256, 0.02, 1e-5),
        "nls4": (20.0, 256, 0.2, 1e-4),
        "conv": (20.0, 256, 0.5, 1e-4),
        "fkpp": (20.0, 256, 0.3, 1e-4),
    }
    cfg = ScenarioConfig.default("rd")
    assert cfg.sigma == 0.1 and cfg.trace_samples == 50 and cfg.output_dir == "out"


def test_config_file_and_flag_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# coarse run\nM = 64\nT=0.25  # shorter\ntrace-samples=7\n")
    parser = cli.build_parser()
    args = parser.parse_args(["rd", "--config", str(conf), "--T", "0.1"])
    cfg = cli.config_from_args(args, "rd")
    assert (cfg.M, cfg.T, cfg.trace_samples, cfg.L) == (64, 0.1, 7, 20.0)


@pytest.mark.parametrize("text", ["M=abc\n", "bogus=1\n", "no equals sign\n"])
def test_bad_config_is_a_usage_error(tmp_path, text):
    conf = tmp_path / "bad.conf"
    conf.write_text(text)
    assert cli.main(["fkpp", "--config", str(conf)]) == cli.EXIT_USAGE


@pytest.mark.parametrize(
    "argv", [["nope"], ["kdv", "--M", "100"], ["rd", "--dt", "-1"], ["nls", "--nonlinear-step", "rk2"], []]
)
def test_bad_arguments_exit_2(argv, capsys):
    assert cli.main(argv) == cli.EXIT_USAGE


def test_nls_at_time_zero(tmp_path, capsys):
    assert cli.main(["nls", "--T", "0", "--M", "64", "--output", str(tmp_path)]) == cli.EXIT_OK
    summary = (tmp_path / "summary_nls.txt").read_text()
    sup = float(summary.split("sup_error=")[1].split()[0])
    assert sup <= 1e-12


def test_threshold_override_fails_run(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("RICCATI_THRESHOLD", "0")
    assert cli.main(["fkpp", "--M", "64", "--output", str(tmp_path)]) == cli.EXIT_THRESHOLD
    monkeypatch.setenv("RICCATI_THRESHOLD", "zero")
    assert cli.main(["fkpp", "--M", "64", "--output", str(tmp_path)]) == cli.EXIT_USAGE


def test_numerical_failure_exit_3(tmp_path, monkeypatch, capsys):
    def singular(cfg, emit=True):
        raise NearSingular("|det2| = 0", det2=0j)

    monkeypatch.setattr(cli, "run_scenario", singular)
    assert cli.main(["kdv", "--output", str(tmp_path)]) == cli.EXIT_NUMERICAL
    assert "numerical failure in kdv" in capsys.readouterr().err


def test_io_failure_exit_4(tmp_path, capsys):
    blocker = tmp_path / "occupied"
    blocker.write_text("")
    assert cli.main(["fkpp", "--M", "64", "--output", str(blocker / "x")]) == cli.EXIT_IO


def test_thread_cap(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("RICCATI_THREADS", "1")
    assert cli.main(["conv", "--M", "64", "--T", "0.1", "--output", str(tmp_path)]) == cli.EXIT_OK
    monkeypatch.setenv("RICCATI_THREADS", "0")
    assert cli.main(["conv", "--M", "64", "--output", str(tmp_path)]) == cli.EXIT_USAGE


def test_reduced_resolution_rd(tmp_path, capsys):
    assert cli.main(["rd", "--M", "64", "--output", str(tmp_path)]) == cli.EXIT_OK
    summary = (tmp_path / "summary_rd.txt").read_text()
    assert float(summary.split("sup_error=")[1].split()[0]) <= 1e-2
    assert "mean_abs_error_2=" in summary


def test_repeated_runs_are_byte_identical(tmp_path, capsys):
    for out in ("a", "b"):
        for scen in ("kdv", "nls"):
            argv = [scen, "--M", "32", "--T", "0.01", "--dt", "1e-3", "--output", str(tmp_path / out)]
            assert cli.main(argv) in (cli.EXIT_OK, cli.EXIT_THRESHOLD)
    csvs = sorted(f for f in os.listdir(tmp_path / "a") if f.endswith(".csv"))
    assert len(csvs) == 4
    match, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", csvs, shallow=False)
    assert mismatch == [] and errors == []

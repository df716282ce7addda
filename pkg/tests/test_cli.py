"""Config parsing, artifacts, manifest reproducibility, CLI exit codes."""

import os

import numpy as np
import pytest

from dropsteady.cli import EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, EXIT_VALIDATION, main
from dropsteady.driver import SolveConfig
from dropsteady.io import ConfigError, config_from_manifest, dump_config, load_config

SMALL = """
[physics]
rho_tilde = 1e-3

[discretization]
band_limit = 10
n_r_int = 18
n_r_ext = 28

[iteration]
max_iters = 30
"""


@pytest.fixture(scope="module")
def cfgfile(tmp_path_factory):
    p = tmp_path_factory.mktemp("cfg") / "run.cfg"
    p.write_text(SMALL)
    return str(p)


@pytest.fixture(scope="module")
def solved_out(cfgfile, tmp_path_factory):
    out = str(tmp_path_factory.mktemp("out"))
    assert main(["solve", "--config", cfgfile, "--out", out]) == EXIT_OK
    return out


def test_config_round_trip(tmp_path):
    cfg = SolveConfig(rho_tilde=2e-3, band_limit=10, n_r_int=18, n_r_ext=28)
    p = tmp_path / "c.cfg"
    p.write_text(dump_config(cfg))
    back = load_config(str(p))
    assert back == cfg


def test_malformed_config_reports_key(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("[physics]\nrho_tilde = 1e-3\nbogus_key = 2\n")
    with pytest.raises(ConfigError) as e:
        load_config(str(p))
    assert "bogus_key" in str(e.value)
    assert main(["solve", "--config", str(p), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_bad_value_reports_context(tmp_path):
    p = tmp_path / "bad2.cfg"
    p.write_text("[physics]\nrho_tilde = not_a_number\n")
    with pytest.raises(ConfigError) as e:
        load_config(str(p))
    assert "rho_tilde" in str(e.value)


def test_missing_config_is_config_error(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_solver_failure_exit_code(tmp_path):
    p = tmp_path / "huge.cfg"
    p.write_text(
        "[physics]\nrho_tilde = 0.4\n\n[discretization]\nband_limit = 8\n"
        "n_r_int = 14\nn_r_ext = 22\n\n[iteration]\nmax_iters = 6\n"
    )
    assert main(["solve", "--config", str(p), "--out", str(tmp_path)]) == EXIT_SOLVER


def test_trivial_solution_artifacts(tmp_path):
    p = tmp_path / "zero.cfg"
    p.write_text(SMALL.replace("rho_tilde = 1e-3", "rho_tilde = 0"))
    out = tmp_path / "out0"
    assert main(["solve", "--config", str(p), "--out", str(out)]) == EXIT_OK
    shape = np.loadtxt(out / "interface_shape.csv", delimiter=",", skiprows=1)
    assert np.all(shape[:, 1] == 0.0)


def test_solve_artifacts_exist(solved_out):
    for name in ("manifest.txt", "interface_shape.csv", "shell_profiles.csv", "diagnostics.txt"):
        assert os.path.exists(os.path.join(solved_out, name))


def test_manifest_reproduces_run(solved_out, cfgfile, tmp_path):
    cfg = config_from_manifest(os.path.join(solved_out, "manifest.txt"))
    assert cfg == load_config(cfgfile)
    out2 = tmp_path / "out2"
    code = main(["solve", "--config", os.path.join(solved_out, "manifest.txt"), "--out", str(out2)])
    assert code == EXIT_OK
    for name in ("interface_shape.csv", "shell_profiles.csv"):
        with open(os.path.join(solved_out, name), "rb") as a, open(out2 / name, "rb") as b:
            assert a.read() == b.read()


def test_validate_filter_and_fault(capsys):
    assert main(["validate", "--only", "curvature"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "curvature" in out and "PASS" in out
    assert main(["validate", "--only", "oseenlet", "--inject-fault", "oracle_mu2"]) == EXIT_OK
    assert main(["validate", "--only", "drop-flow", "--inject-fault", "oracle_mu2"]) == EXIT_VALIDATION


def test_sweep(tmp_path, cfgfile):
    out = tmp_path / "sw"
    code = main(["sweep", "--config", cfgfile, "--out", str(out), "--rho-grid", "1e-3,0.4"])
    assert code == EXIT_OK
    lines = (out / "sweep.csv").read_text().strip().splitlines()
    assert len(lines) == 3
    assert lines[1].endswith("ok")
    assert "failed" in lines[2]


def test_sweep_empty_grid(tmp_path, cfgfile):
    out = tmp_path / "sw0"
    assert main(["sweep", "--config", cfgfile, "--out", str(out), "--rho-grid", ""]) == EXIT_OK
    lines = (out / "sweep.csv").read_text().strip().splitlines()
    assert len(lines) == 1  # header only


def test_sweep_lambda_scaling(tmp_path, cfgfile):
    out = tmp_path / "sw2"
    assert main(
        ["sweep", "--config", cfgfile, "--out", str(out), "--rho-grid", "1e-3,5e-4"]
    ) == EXIT_OK
    rows = np.genfromtxt(out / "sweep.csv", delimiter=",", skip_header=1, usecols=(0, 1))
    ratio = rows[0, 1] / rows[1, 1]
    assert abs(ratio - 2.0) < 0.1  # lambda approximately linear in rho_tilde

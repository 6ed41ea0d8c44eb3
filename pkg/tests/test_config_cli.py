"""Configuration parsing, builders, and the command-line surface."""

import json

import numpy as np
import pytest

from kvwave.basis import Domain, build_basis, from_spectral, h1_norm
from kvwave.cli import main, serialize_config
from kvwave.config import (
    ConfigError,
    build_initial,
    config_hash,
    parse_config_text,
    validate_checks,
)

MINIMAL = """\
domain.dimension = 1
domain.edge_lengths = 3.141592653589793
basis.modes_per_axis = 12
damping.preset = squared_bump
damping.eta = 1.0
damping.center = 1.5707963267948966
damping.radius = 0.8
truncation.k = 5.0
initial.preset = single_mode
initial.mode = 1
initial.amplitude = 0.4
scheme.dt = 0.002
run.T = 1.0
run.sample_every = 10
run.N_list = 4, 8
"""


def write_cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_parse_minimal():
    cfg = parse_config_text(MINIMAL)
    assert cfg["basis.modes_per_axis"] == 12
    assert cfg["run.N_list"] == [4.0, 8.0]
    assert cfg["scheme.name"] == "imex_cn"  # default
    assert cfg.hash == config_hash(MINIMAL)


def test_parse_errors():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config_text("bogus.key = 1\n")
    with pytest.raises(ConfigError, match="line 2"):
        parse_config_text("domain.dimension = 1\nnot an assignment\n")
    with pytest.raises(ConfigError, match="cannot parse"):
        parse_config_text("domain.dimension = one\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_text("run.T = 1.0\nrun.T = 2.0\n", require=())
    with pytest.raises(ConfigError, match="missing required"):
        parse_config_text("domain.dimension = 1\n", require=("run.T",))


def test_comments_and_hash_normalization():
    text = "run.T = 1.0  # one unit of time\n"
    cfg = parse_config_text(text, require=())
    assert cfg["run.T"] == 1.0
    assert config_hash("a = 1\r\nb = 2\n") == config_hash("a = 1\nb = 2\n")


def test_unknown_check_rejected():
    cfg = parse_config_text(MINIMAL + "checks.run = no_such_check\n")
    with pytest.raises(ConfigError, match="unknown check"):
        validate_checks(cfg)


def test_build_initial_single_mode():
    cfg = parse_config_text(MINIMAL)
    b = build_basis(Domain((np.pi,)), 12, 48)
    st = build_initial(cfg, b)
    assert st.u[0] == 0.4
    assert np.all(st.u[1:] == 0.0)
    assert np.all(st.v == 0.0)


def test_build_initial_random_h1_normalized():
    text = MINIMAL.replace(
        "initial.preset = single_mode", "initial.preset = random_h1"
    ) + "initial.seed = 9\ninitial.decay = 2.0\n"
    cfg = parse_config_text(text)
    b = build_basis(Domain((np.pi,)), 12, 48)
    s1 = build_initial(cfg, b)
    s2 = build_initial(cfg, b)
    assert np.array_equal(s1.u, s2.u)  # deterministic per seed
    assert h1_norm(s1.u, b) == pytest.approx(cfg["initial.amplitude"], rel=1e-12)


def test_build_initial_grid_file(tmp_path):
    b = build_basis(Domain((np.pi,)), 12, 48)
    e = np.zeros(b.n_modes)
    e[0] = 1.0
    np.save(tmp_path / "u0.npy", from_spectral(e, b))
    text = MINIMAL.replace(
        "initial.preset = single_mode", "initial.preset = grid_file"
    ) + f"initial.path_u0 = {tmp_path / 'u0.npy'}\n"
    cfg = parse_config_text(text)
    st = build_initial(cfg, b)
    assert st.u[0] == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(st.u[1:])) <= 1e-12


def test_cmd_run_and_determinism(tmp_path):
    cfg_path = write_cfg(tmp_path, MINIMAL)
    out1 = tmp_path / "o1"
    out2 = tmp_path / "o2"
    assert main(["run", "--config", cfg_path, "--out", str(out1)]) == 0
    assert main(["run", "--config", cfg_path, "--out", str(out2)]) == 0
    b1 = (out1 / "trajectory.csv").read_bytes()
    b2 = (out2 / "trajectory.csv").read_bytes()
    assert b1 == b2
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert manifest["config_hash"] == config_hash(MINIMAL)
    assert manifest["outcome"] == "ok"
    assert manifest["schema_version"] == 1
    header = b1.decode().splitlines()[0]
    assert header == "t,E,Y,d,D,E_low_N4,E_high_N4,E_low_N8,E_high_N8,u_L10,u_L12"


def test_cmd_run_malformed_config(tmp_path, capsys):
    path = write_cfg(tmp_path, "domain.dimension = 1\nooops\n")
    assert main(["run", "--config", path]) == 2
    assert "line 2" in capsys.readouterr().err


def test_cmd_run_solver_failure(tmp_path):
    text = MINIMAL.replace("scheme.dt = 0.002", "scheme.dt = 50.0").replace(
        "run.T = 1.0", "run.T = 200.0"
    ) + "scheme.name = fully_implicit_newton\nscheme.newton_max_iters = 5\n"
    text = text.replace("initial.amplitude = 0.4", "initial.amplitude = 2.5")
    path = write_cfg(tmp_path, text)
    out = tmp_path / "fail"
    assert main(["run", "--config", path, "--out", str(out)]) == 3
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["outcome"] == "NewtonDivergenceError"
    assert manifest["failure_time"] == 50.0


def test_cmd_verify_all_pass(tmp_path):
    text = MINIMAL + "checks.run = structural, partition, bernstein, tail, aliasing\n"
    path = write_cfg(tmp_path, text)
    out = tmp_path / "v"
    assert main(["verify", "--config", path, "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["all_passed"]
    assert set(summary["checks"]) == {"structural", "partition", "bernstein", "tail", "aliasing"}


def test_cmd_verify_empty_checklist(tmp_path):
    path = write_cfg(tmp_path, MINIMAL)
    out = tmp_path / "v0"
    assert main(["verify", "--config", path, "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["checks"] == {}
    assert summary["all_passed"]


def test_cmd_verify_noncompliant_structural(tmp_path):
    text = """\
domain.dimension = 1
domain.edge_lengths = 1.0
basis.modes_per_axis = 32
basis.grid_per_axis = 1024
damping.preset = linear_ramp
damping.slope = 1.0
truncation.k = 5.0
initial.preset = single_mode
initial.mode = 1
scheme.dt = 0.002
run.T = 0.1
checks.run = structural
"""
    path = write_cfg(tmp_path, text)
    out = tmp_path / "nc"
    assert main(["verify", "--config", path, "--out", str(out)]) == 1
    summary = json.loads((out / "summary.json").read_text())
    check = summary["checks"]["structural"]
    assert not check["passed"]
    assert check["witness"]["verdict"] == "NON-COMPLIANT"


def test_cmd_sweep_matches_single_runs(tmp_path):
    sweep_text = MINIMAL + (
        "checks.run = structural\n"
        "sweep.mode = cartesian\n"
        "sweep.axes = truncation.k\n"
        "sweep.values.1 = 5.0, 5.0, 2.0\n"
    )
    path = write_cfg(tmp_path, sweep_text, "sweep.cfg")
    out = tmp_path / "sw"
    assert main(["sweep", "--config", path, "--out", str(out)]) == 0
    rows = (out / "sweep_summary.csv").read_text().splitlines()
    assert len(rows) == 4  # header + 3 cells
    assert "deduplicated" not in rows[0]
    cells = sorted((out / "cells").iterdir())
    assert len(cells) == 2  # k = 5.0 twice deduplicated

    # cell output equals the equivalent standalone run
    cell0 = [c for c in cells if c.name.startswith("0000")][0]
    single_cfg = parse_config_text(sweep_text)
    single_cfg.values["truncation.k"] = 5.0
    for key in ("sweep.mode", "sweep.axes", "sweep.workers"):
        single_cfg.values.pop(key, None)
    single_text = serialize_config(single_cfg.values)
    spath = write_cfg(tmp_path, single_text, "single.cfg")
    sout = tmp_path / "single_out"
    assert main(["run", "--config", spath, "--out", str(sout)]) == 0
    assert (cell0 / "trajectory.csv").read_bytes() == (sout / "trajectory.csv").read_bytes()


def test_cmd_sweep_paired_validation(tmp_path):
    bad = MINIMAL + (
        "sweep.mode = paired\n"
        "sweep.axes = truncation.k, scheme.dt\n"
        "sweep.values.1 = 1.0, 2.0\n"
        "sweep.values.2 = 0.01\n"
    )
    path = write_cfg(tmp_path, bad, "bad_sweep.cfg")
    assert main(["sweep", "--config", path, "--out", str(tmp_path / "x")]) == 2


def test_cmd_basis_info(tmp_path, capsys):
    text = "domain.dimension = 1\ndomain.edge_lengths = 3.141592653589793\nbasis.modes_per_axis = 3\n"
    path = write_cfg(tmp_path, text, "b.cfg")
    assert main(["basis-info", "--config", path]) == 0
    out = capsys.readouterr().out
    assert "1.0" in out and "4.0" in out and "9.0" in out
    assert "ok" in out

    bad = text + "basis.grid_per_axis = 10\n"
    path2 = write_cfg(tmp_path, bad, "b2.cfg")
    assert main(["basis-info", "--config", path2]) == 2


def test_cmd_basis_info_2d(tmp_path, capsys):
    text = "domain.dimension = 2\ndomain.edge_lengths = 3.141592653589793, 3.141592653589793\nbasis.modes_per_axis = 2\n"
    path = write_cfg(tmp_path, text, "b3.cfg")
    assert main(["basis-info", "--config", path]) == 0
    out = capsys.readouterr().out
    assert "2.0" in out and "5.0" in out and "8.0" in out


def test_serialize_round_trip():
    cfg = parse_config_text(MINIMAL)
    text = serialize_config(cfg.values)
    cfg2 = parse_config_text(text)
    assert cfg2.values == cfg.values

"""Config parsing, recipe resolution, CLI exit codes and artifacts."""

import json

import numpy as np
import pytest

from kdvhl.cli import available_recipes, main, resolve_config
from kdvhl.config import ConfigError, dump_config, load_config, parse_config

MINI_SIMULATE = """
experiment = simulate
grid.L = 16.0
grid.n = 161
time.dt = 0.02
time.T = 0.2
weight.epsilon = 0.4
weight.b = 2.0
weight.v = 1.0
weight.x0 = 4.0
data.kind = bump
data.amplitude = 0.5
data.center = 6.0
data.width = 1.0
boundary.kind = zero
diagnostics.identity_levels = 1,2
"""


def test_defaults_round_trip():
    cfg = parse_config("")
    d = dump_config(cfg)
    assert d["experiment"] == "simulate"
    assert d["grid.n"] == 801
    assert d["diagnostics.identity_levels"] == []


def test_parse_values_and_comments():
    cfg = parse_config(MINI_SIMULATE + "\n# trailing comment\n")
    assert cfg.n == 161
    assert cfg.identity_levels == (1, 2)
    assert cfg.data_kind == "bump"


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="grid.m"):
        parse_config("grid.m = 100")


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config("grid.n = 101\ngrid.n = 201")


def test_malformed_value_rejected():
    with pytest.raises(ConfigError, match="grid.n"):
        parse_config("grid.n = many")
    with pytest.raises(ConfigError, match="expected"):
        parse_config("grid.n 101")


def test_semantic_validation():
    with pytest.raises(ConfigError, match="experiment"):
        parse_config("experiment = explode")
    with pytest.raises(ConfigError, match="data.kind"):
        parse_config("data.kind = noise")
    with pytest.raises(ConfigError, match="boundary.kind"):
        parse_config("boundary.kind = open")
    with pytest.raises(ConfigError, match="5"):
        parse_config("weight.epsilon = 1.0\nweight.b = 2.0")
    with pytest.raises(ConfigError, match="grid.n"):
        parse_config("grid.n = 4")
    with pytest.raises(ConfigError, match="nonnegative"):
        parse_config("weight.v = -1.0")
    with pytest.raises(ConfigError, match="trace_branch"):
        parse_config("diagnostics.trace_branch = 5")


def test_bool_and_intlist_forms():
    assert parse_config("solver.nonlinear = off").nonlinear is False
    assert parse_config("solver.nonlinear = yes").nonlinear is True
    assert parse_config("diagnostics.identity_levels = 2").identity_levels == (2,)
    assert parse_config("diagnostics.identity_levels = 1 2").identity_levels == (1, 2)
    with pytest.raises(ConfigError):
        parse_config("solver.nonlinear = maybe")


def test_load_config_from_file(tmp_path):
    p = tmp_path / "mini.cfg"
    p.write_text(MINI_SIMULATE)
    assert load_config(p).n == 161


def test_bundled_recipes_all_parse():
    names = available_recipes()
    assert {"mms", "soliton", "oracle", "dissipation", "l1_full_time",
            "l2_stopped", "trace_gain", "identity_l1", "identity_l2"} <= set(names)
    for name in names:
        cfg = resolve_config(name)
        assert cfg.experiment in ("simulate", "converge", "propagation",
                                  "traces", "identity", "oracle-compare")


def test_resolve_config_failure_lists_recipes():
    with pytest.raises(ConfigError, match="mms"):
        resolve_config("definitely_not_a_recipe")


def test_cli_simulate_artifacts(tmp_path, capsys):
    cfgfile = tmp_path / "mini.cfg"
    cfgfile.write_text(MINI_SIMULATE)
    out = tmp_path / "run1"
    rc = main(["simulate", "--config", str(cfgfile), "--out", str(out)])
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert report["schema"] == "kdvhl-report-v1"
    assert "stopping_times" in report
    assert (out / "summary.txt").read_text().startswith("experiment: simulate")
    table = np.loadtxt(out / "series.csv", delimiter=",", skiprows=1)
    assert table.shape == (11, 9)
    captured = capsys.readouterr()
    assert "wrote" in captured.out


def test_cli_quiet_silences_stdout(tmp_path, capsys):
    cfgfile = tmp_path / "mini.cfg"
    cfgfile.write_text(MINI_SIMULATE)
    rc = main(["simulate", "--config", str(cfgfile), "--out",
               str(tmp_path / "q"), "--quiet"])
    assert rc == 0
    assert capsys.readouterr().out == ""


def test_cli_config_error_exit_code(tmp_path, capsys):
    rc = main(["simulate", "--config", "no_such_recipe", "--out", str(tmp_path / "x")])
    assert rc == 2
    assert "config error" in capsys.readouterr().err


def test_cli_solver_failure_exit_code(tmp_path, capsys):
    bad = tmp_path / "diverge.cfg"
    bad.write_text(
        "experiment = simulate\n"
        "grid.L = 20.0\ngrid.n = 201\n"
        "time.dt = 0.2\ntime.T = 0.4\n"
        "solver.picard_max = 6\n"
        "data.kind = bump\ndata.amplitude = 40.0\n"
        "data.center = 10.0\ndata.width = 1.5\n"
        "boundary.kind = zero\n"
    )
    rc = main(["simulate", "--config", str(bad), "--out", str(tmp_path / "y")])
    assert rc == 3
    assert "solver failure" in capsys.readouterr().err


def test_cli_levels_override(tmp_path):
    cfgfile = tmp_path / "conv.cfg"
    cfgfile.write_text(
        "experiment = converge\n"
        "grid.L = 30.0\ngrid.n = 201\n"
        "time.dt = 0.04\ntime.T = 0.2\n"
        "data.kind = mms\ndata.amplitude = 1.0\n"
        "data.center = 8.0\ndata.width = 2.0\n"
    )
    out = tmp_path / "conv_out"
    rc = main(["converge", "--config", str(cfgfile), "--out", str(out), "--quiet",
               "--levels", "2"])
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert len(report["levels"]) == 2


def test_cli_deterministic_reports(tmp_path):
    cfgfile = tmp_path / "mini.cfg"
    cfgfile.write_text(MINI_SIMULATE)
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["simulate", "--config", str(cfgfile), "--out", str(out),
                     "--quiet"]) == 0
        outs.append((out / "report.json").read_bytes())
    assert outs[0] == outs[1]


def test_converge_requires_exact_solution():
    from kdvhl.experiments import run_converge

    with pytest.raises(ConfigError, match="mms or soliton"):
        run_converge(resolve_config("l1_full_time"))


def test_identity_requires_levels():
    from kdvhl.experiments import run_identity

    cfg = resolve_config("mms")
    with pytest.raises(ConfigError, match="identity_levels"):
        run_identity(cfg)

import shutil
import subprocess

import pytest

from swarmshape.cli import (
    EXIT_CONFIG,
    EXIT_DIVERGED,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    main,
)

# small enough that a whole ablation stays around tens of milliseconds
QUICK = """
schema = 1
shape = ellipse
a = 3.0
b = 1.5
count = 6
seed = 3
max_steps = 150
"""

# 25 agents stacked tight with a pair gain at the float ceiling overflow
# on the very first steps
EXPLODES = """
schema = 1
shape = circle
r0 = 4.0
count = 25
seed = 0
k1 = 1.7e308
"""


@pytest.fixture
def quick_cfg(tmp_path):
    path = tmp_path / "quick.cfg"
    path.write_text(QUICK)
    return path


def test_run_writes_outputs_and_summary(quick_cfg, tmp_path, capsys):
    out = tmp_path / "results"
    code = main(["run", "--scenario", str(quick_cfg), "--out", str(out)])
    assert code == EXIT_OK
    stdout = capsys.readouterr().out
    assert "terminal=max_steps" in stdout
    assert "steps=150" in stdout
    assert "shape_error=" in stdout
    traj = out / "quick_trajectory.csv"
    mets = out / "quick_metrics.csv"
    assert traj.exists() and mets.exists()
    assert str(traj) in stdout and str(mets) in stdout
    assert traj.read_text().splitlines()[0] == "time,agent_id,x1,x2"


def test_run_is_reproducible_and_seed_changes_output(quick_cfg, tmp_path):
    outs = [tmp_path / n for n in ("a", "b", "c")]
    assert main(["run", "--scenario", str(quick_cfg), "--out", str(outs[0])]) == EXIT_OK
    assert main(["run", "--scenario", str(quick_cfg), "--out", str(outs[1])]) == EXIT_OK
    assert main(
        ["run", "--scenario", str(quick_cfg), "--out", str(outs[2]), "--seed", "9"]
    ) == EXIT_OK
    a, b, c = (p.joinpath("quick_trajectory.csv").read_bytes() for p in outs)
    assert a == b
    assert a != c


def test_run_respects_configured_output_paths(tmp_path, capsys):
    cfg = tmp_path / "custom.cfg"
    cfg.write_text(QUICK + "trajectory_path = my_traj.csv\nmetrics_path = my_mets.csv\n")
    out = tmp_path / "o"
    assert main(["run", "--scenario", str(cfg), "--out", str(out)]) == EXIT_OK
    assert (out / "my_traj.csv").exists()
    assert (out / "my_mets.csv").exists()
    assert not (out / "custom_trajectory.csv").exists()


def test_run_missing_scenario_is_io_error(tmp_path, capsys):
    code = main(["run", "--scenario", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)])
    assert code == EXIT_IO
    assert "error:" in capsys.readouterr().err


def test_run_bad_config_is_config_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(QUICK + "sigma = 0.0\n")
    code = main(["run", "--scenario", str(cfg), "--out", str(tmp_path)])
    assert code == EXIT_CONFIG
    assert "sigma" in capsys.readouterr().err


def test_run_diverged_exit_code(tmp_path, capsys):
    cfg = tmp_path / "explodes.cfg"
    cfg.write_text(EXPLODES)
    code = main(["run", "--scenario", str(cfg), "--out", str(tmp_path)])
    assert code == EXIT_DIVERGED
    captured = capsys.readouterr()
    assert "terminal=diverged" in captured.out
    assert "run diverged" in captured.err
    # outputs are still written so the blow-up can be inspected
    assert (tmp_path / "explodes_metrics.csv").exists()


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["run"],  # --scenario is required
        ["track"],  # --motion is required
        ["track", "--motion", "zigzag"],
        ["sweep", "--scenario", "x.cfg"],  # --param/--values required
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE
    capsys.readouterr()


@pytest.mark.parametrize("argv", [["-h"], ["run", "-h"], ["ablate", "-h"]])
def test_help_exits_zero(argv, capsys):
    assert main(argv) == EXIT_OK
    assert "usage" in capsys.readouterr().out.lower()


@pytest.mark.parametrize("motion", ["linear", "circular"])
def test_track_writes_tracking_metrics(motion, tmp_path, capsys):
    code = main(
        ["track", "--motion", motion, "--count", "6", "--steps", "60",
         "--out", str(tmp_path)]
    )
    assert code == EXIT_OK
    stdout = capsys.readouterr().out
    assert "tracking_error=" in stdout
    assert "centroid_offset=" in stdout
    mets = tmp_path / f"track_{motion}_metrics.csv"
    header = mets.read_text().splitlines()[0]
    assert header.endswith("tracking_error,centroid_offset")
    assert (tmp_path / f"track_{motion}_trajectory.csv").exists()


def test_ablate_outputs(quick_cfg, tmp_path, capsys):
    out = tmp_path / "abl"
    code = main(
        ["ablate", "--scenario", str(quick_cfg), "--seeds", "2", "--out", str(out)]
    )
    assert code == EXIT_OK
    stdout = capsys.readouterr().out
    assert "mean_cv" in stdout
    assert "repulsion" in stdout  # the verdict line, whichever way it lands
    summary = out / "quick_ablation.csv"
    lines = summary.read_text().splitlines()
    assert lines[0] == "arm,seed,spacing_cv,shape_error,terminal,steps"
    assert len(lines) == 1 + 2 * 2  # two arms per seed
    arms = [line.split(",")[0] for line in lines[1:]]
    assert arms == ["off", "on", "off", "on"]
    seeds = [line.split(",")[1] for line in lines[1:]]
    assert seeds == ["3", "3", "4", "4"]  # scenario seed, then consecutive


def test_ablate_rejects_bad_inputs(quick_cfg, tmp_path, capsys):
    code = main(
        ["ablate", "--scenario", str(quick_cfg), "--seeds", "0", "--out", str(tmp_path)]
    )
    assert code == EXIT_CONFIG
    r_zero = tmp_path / "rzero.cfg"
    r_zero.write_text(QUICK + "r = 0.0\n")
    code = main(["ablate", "--scenario", str(r_zero), "--out", str(tmp_path)])
    assert code == EXIT_CONFIG
    assert "r > 0" in capsys.readouterr().err


def test_sweep_outputs(quick_cfg, tmp_path, capsys):
    out = tmp_path / "sw"
    code = main(
        ["sweep", "--scenario", str(quick_cfg), "--param", "r",
         "--values", "0.0,0.1", "--out", str(out)]
    )
    assert code == EXIT_OK
    summary = out / "quick_sweep_r.csv"
    lines = summary.read_text().splitlines()
    assert lines[0] == "r,terminal,steps,shape_error,spacing_cv,max_speed"
    assert len(lines) == 3
    assert [line.split(",")[0] for line in lines[1:]] == ["0.0", "0.1"]
    assert "summary:" in capsys.readouterr().out


def test_sweep_geometry_param(quick_cfg, tmp_path):
    code = main(
        ["sweep", "--scenario", str(quick_cfg), "--param", "a",
         "--values", "2.0,3.0", "--out", str(tmp_path)]
    )
    assert code == EXIT_OK
    assert (tmp_path / "quick_sweep_a.csv").exists()


def test_sweep_rejects_bad_inputs(quick_cfg, tmp_path, capsys):
    code = main(
        ["sweep", "--scenario", str(quick_cfg), "--param", "r0",
         "--values", "1.0", "--out", str(tmp_path)]
    )
    assert code == EXIT_CONFIG  # r0 does not apply to an ellipse scenario
    code = main(
        ["sweep", "--scenario", str(quick_cfg), "--param", "bogus",
         "--values", "1.0", "--out", str(tmp_path)]
    )
    assert code == EXIT_CONFIG
    code = main(
        ["sweep", "--scenario", str(quick_cfg), "--param", "r",
         "--values", ", ,", "--out", str(tmp_path)]
    )
    assert code == EXIT_CONFIG
    capsys.readouterr()


@pytest.mark.skipif(shutil.which("swarmshape") is None, reason="script not on PATH")
def test_installed_script_smoke(quick_cfg, tmp_path):
    proc = subprocess.run(
        ["swarmshape", "run", "--scenario", str(quick_cfg), "--out", str(tmp_path)],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == EXIT_OK, proc.stderr
    assert "terminal=" in proc.stdout

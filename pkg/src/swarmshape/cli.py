"""Command line interface.

Subcommands: ``run`` a scenario file, ``track`` a moving centre with stock
settings, ``ablate`` the repulsion term over many seeds, ``sweep`` one
scenario key over a list of values.

Exit codes: 0 success, 1 usage error, 2 invalid configuration, 3 run
diverged, 4 I/O failure.  No environment variables are consulted.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .integrator import (
    IntegratorConfig,
    TERMINAL_DIVERGED,
    TrajectoryRecord,
)
from .scenario import (
    Scenario,
    apply_override,
    export_metrics,
    export_trajectory,
    load_scenario,
    run_scenario,
)
from .shapes import Circle
from .state import ConfigError, DynamicsParams, InitSpec
from .tracking import CircularCenter, LinearCenter

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_IO = 4

__all__ = [
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_CONFIG",
    "EXIT_DIVERGED",
    "EXIT_IO",
    "main",
    "console",
]


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; this CLI reserves 2 for bad
    configuration files, so usage errors are remapped to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="swarmshape", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("--scenario", required=True, help="scenario file path")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument("--out", default=".", help="output directory (default: .)")
    p_run.set_defaults(func=_cmd_run)

    p_track = sub.add_parser(
        "track", help="encircle a moving centre (stock settings)"
    )
    p_track.add_argument(
        "--motion", required=True, choices=("linear", "circular"), help="centre motion"
    )
    p_track.add_argument("--count", type=int, default=10, help="number of agents")
    p_track.add_argument("--r0", type=float, default=2.0, help="encircling radius")
    p_track.add_argument("--steps", type=int, default=200, help="iterations to run")
    p_track.add_argument("--seed", type=int, default=1, help="initial-scatter seed")
    p_track.add_argument("--out", default=".", help="output directory (default: .)")
    p_track.set_defaults(func=_cmd_track)

    p_abl = sub.add_parser(
        "ablate", help="compare repulsion on/off over seeds"
    )
    p_abl.add_argument("--scenario", required=True, help="scenario file path")
    p_abl.add_argument("--seeds", type=int, default=20, help="number of seeds (default: 20)")
    p_abl.add_argument("--out", default=".", help="output directory (default: .)")
    p_abl.set_defaults(func=_cmd_ablate)

    p_sweep = sub.add_parser(
        "sweep", help="sweep one scenario key over values"
    )
    p_sweep.add_argument("--scenario", required=True, help="scenario file path")
    p_sweep.add_argument("--param", required=True, help="scenario key to vary")
    p_sweep.add_argument(
        "--values", required=True, help="comma-separated values, e.g. 0.05,0.1,0.2"
    )
    p_sweep.add_argument("--out", default=".", help="output directory (default: .)")
    p_sweep.set_defaults(func=_cmd_sweep)

    return parser


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _resolve(out: Path, configured: str | None, fallback: str) -> Path:
    if configured is None:
        return out / fallback
    p = Path(configured)
    return p if p.is_absolute() else out / p


def _export_pair(record: TrajectoryRecord, s: Scenario, out: Path, stem: str) -> tuple[Path, Path]:
    traj = _resolve(out, s.output.trajectory_path, f"{stem}_trajectory.csv")
    mets = _resolve(out, s.output.metrics_path, f"{stem}_metrics.csv")
    export_trajectory(record, traj)
    export_metrics(record, mets)
    return traj, mets


def _summarise(record: TrajectoryRecord) -> str:
    bits = [
        f"terminal={record.terminal_reason}",
        f"steps={record.steps_taken}",
        f"shape_error={record.final_metric('shape_error'):.6g}",
        f"spacing_cv={record.final_metric('spacing_cv'):.6g}",
        f"max_speed={record.final_metric('max_speed'):.6g}",
    ]
    if "tracking_error" in record.metric_names:
        bits.append(f"tracking_error={record.final_metric('tracking_error'):.6g}")
        bits.append(f"centroid_offset={record.final_metric('centroid_offset'):.6g}")
    if record.coincidence_events:
        bits.append(f"coincidences={record.coincidence_events}")
    return "  ".join(bits)


def _cmd_run(args) -> int:
    s = load_scenario(args.scenario)
    if args.seed is not None:
        s = replace(s, init=replace(s.init, seed=args.seed))
    record = run_scenario(s)
    out = _outdir(args)
    stem = Path(args.scenario).stem
    traj, mets = _export_pair(record, s, out, stem)
    print(_summarise(record))
    print(f"trajectory: {traj}")
    print(f"metrics:    {mets}")
    if record.terminal_reason == TERMINAL_DIVERGED:
        print("run diverged", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def _cmd_track(args) -> int:
    if args.motion == "linear":
        center = LinearCenter(start=(-10.0, -10.0), velocity=(0.1, 0.1))
    else:
        center = CircularCenter(radius=6.0, period=200)
    s = Scenario(
        init=InitSpec(count=args.count, seed=args.seed),
        params=DynamicsParams(),
        shape=Circle(r0=args.r0),
        center=center,
        integrator=IntegratorConfig(max_steps=args.steps),
    )
    record = run_scenario(s)
    out = _outdir(args)
    stem = f"track_{args.motion}"
    traj, mets = _export_pair(record, s, out, stem)
    print(_summarise(record))
    print(f"trajectory: {traj}")
    print(f"metrics:    {mets}")
    if record.terminal_reason == TERMINAL_DIVERGED:
        print("run diverged", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def _cmd_ablate(args) -> int:
    s = load_scenario(args.scenario)
    if args.seeds < 1:
        raise ConfigError(f"--seeds must be >= 1, got {args.seeds}")
    if s.params.r <= 0.0:
        raise ConfigError(
            "ablation needs a scenario with r > 0 (the r = 0 arm is derived from it)"
        )
    arms = (("off", 0.0), ("on", s.params.r))
    rows = []
    diverged = False
    for i in range(args.seeds):
        seed = s.init.seed + i
        for arm, r in arms:
            si = replace(
                s,
                init=replace(s.init, seed=seed),
                params=replace(s.params, r=r) if r != s.params.r else s.params,
            )
            record = run_scenario(si)
            diverged = diverged or record.terminal_reason == TERMINAL_DIVERGED
            rows.append(
                (
                    arm,
                    seed,
                    record.final_metric("spacing_cv"),
                    record.final_metric("shape_error"),
                    record.terminal_reason,
                    record.steps_taken,
                )
            )

    out = _outdir(args)
    stem = Path(args.scenario).stem
    path = out / f"{stem}_ablation.csv"
    lines = ["arm,seed,spacing_cv,shape_error,terminal,steps"]
    for arm, seed, cv, err, terminal, steps in rows:
        lines.append(f"{arm},{seed},{cv!r},{err!r},{terminal},{steps}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    print(f"{'arm':<10}{'mean_cv':>12}{'std_cv':>12}{'mean_err':>12}{'runs':>6}")
    summary = {}
    for arm, _ in arms:
        cvs = np.array([row[2] for row in rows if row[0] == arm])
        errs = np.array([row[3] for row in rows if row[0] == arm])
        summary[arm] = cvs.mean()
        label = f"r={'0' if arm == 'off' else s.params.r}"
        print(
            f"{label:<10}{cvs.mean():>12.5f}{cvs.std():>12.5f}{errs.mean():>12.5f}{len(cvs):>6d}"
        )
    if summary["on"] < summary["off"]:
        print("repulsion lowers mean spacing_cv "
              f"({summary['on']:.5f} < {summary['off']:.5f})")
    else:
        print("repulsion does NOT lower mean spacing_cv "
              f"({summary['on']:.5f} >= {summary['off']:.5f})")
    print(f"summary: {path}")
    return EXIT_DIVERGED if diverged else EXIT_OK


def _cmd_sweep(args) -> int:
    s = load_scenario(args.scenario)
    raw_values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not raw_values:
        raise ConfigError("--values must name at least one value")
    rows = []
    diverged = False
    for raw in raw_values:
        si = apply_override(s, args.param, raw)
        record = run_scenario(si)
        diverged = diverged or record.terminal_reason == TERMINAL_DIVERGED
        rows.append(
            (
                raw,
                record.terminal_reason,
                record.steps_taken,
                record.final_metric("shape_error"),
                record.final_metric("spacing_cv"),
                record.final_metric("max_speed"),
            )
        )

    out = _outdir(args)
    stem = Path(args.scenario).stem
    path = out / f"{stem}_sweep_{args.param}.csv"
    lines = [f"{args.param},terminal,steps,shape_error,spacing_cv,max_speed"]
    for value, terminal, steps, err, cv, speed in rows:
        lines.append(f"{value},{terminal},{steps},{err!r},{cv!r},{speed!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    print(f"{args.param:<12}{'terminal':<12}{'steps':>7}{'shape_err':>12}{'cv':>10}")
    for value, terminal, steps, err, cv, _ in rows:
        print(f"{value:<12}{terminal:<12}{steps:>7d}{err:>12.5f}{cv:>10.5f}")
    print(f"summary: {path}")
    return EXIT_DIVERGED if diverged else EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles -h and usage failures
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def console() -> None:
    """setuptools entry point."""
    sys.exit(main())

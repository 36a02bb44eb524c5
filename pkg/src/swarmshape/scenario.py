"""Scenario files, run driver, and CSV export.

Scenario format: flat ``key = value`` lines.  ``#`` starts a comment, blank
lines are ignored, keys may appear once.  ``schema = 1`` is required, as are
``shape`` (with its geometry keys), ``count`` and ``seed``; everything else
has documented defaults.  Unknown keys, duplicate keys and keys that do not
apply to the chosen shape or centre are rejected with their line number —
a typo should never silently change an experiment.

Exports write CSV atomically (temp file + rename in the target directory),
so concurrent runs never interleave output, and floats are formatted with
``repr`` so every value round-trips bit-exactly through the file.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .integrator import (
    Convergence,
    IntegratorConfig,
    TrajectoryRecord,
    run,
)
from .shapes import Circle, Ellipse, Line, Shape, Square
from .state import ConfigError, DynamicsParams, InitSpec, init_swarm
from .tracking import CenterTrajectory, CircularCenter, LinearCenter, StaticCenter

__all__ = [
    "SCHEMA_VERSION",
    "OutputSpec",
    "Scenario",
    "parse_scenario",
    "load_scenario",
    "serialize_scenario",
    "apply_override",
    "run_scenario",
    "export_trajectory",
    "export_metrics",
]

SCHEMA_VERSION = 1

_SHAPE_KEYS = {
    "line": ("m", "c"),
    "ellipse": ("a", "b"),
    "circle": ("r0",),
    "square": ("a",),
}

_CENTER_KEYS = {
    "static": ("center_x", "center_y"),
    "linear": ("center_x", "center_y", "center_vx", "center_vy"),
    "circular": ("center_radius", "center_period"),
}

# Every key the format knows, for distinguishing "unknown" from "not
# applicable here" in error messages.
_ALL_KEYS = (
    {"schema", "shape", "count", "seed", "lower", "upper"}
    | {"k1", "k2", "sigma", "beta", "r"}
    | {"dt", "scheme", "max_steps", "vel_tol", "shape_tol", "window"}
    | {"center", "snapshot_stride", "trajectory_path", "metrics_path"}
    | {k for keys in _SHAPE_KEYS.values() for k in keys}
    | {k for keys in _CENTER_KEYS.values() for k in keys}
)


@dataclass(frozen=True)
class OutputSpec:
    """Where a run writes its CSVs and how densely it snapshots.

    ``snapshot_stride=None`` means the automatic rule (every state up to 500
    steps, every 10th beyond).  Paths left ``None`` are derived by the CLI
    from the scenario file name.
    """

    trajectory_path: str | None = None
    metrics_path: str | None = None
    snapshot_stride: int | None = None

    def __post_init__(self):
        if self.snapshot_stride is not None:
            if not isinstance(self.snapshot_stride, (int, np.integer)) or isinstance(
                self.snapshot_stride, bool
            ):
                raise ConfigError(
                    f"snapshot_stride must be an integer, got {self.snapshot_stride!r}"
                )
            object.__setattr__(self, "snapshot_stride", int(self.snapshot_stride))
            if self.snapshot_stride < 1:
                raise ConfigError(
                    f"snapshot_stride must be >= 1, got {self.snapshot_stride}"
                )


@dataclass(frozen=True)
class Scenario:
    """A complete, runnable experiment description."""

    init: InitSpec
    params: DynamicsParams
    shape: Shape
    center: CenterTrajectory = field(default_factory=StaticCenter)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    output: OutputSpec = field(default_factory=OutputSpec)


class _KeyTable:
    """Parsed key/value lines with per-key line numbers and typed getters."""

    def __init__(self, text: str, name: str):
        self.name = name
        self.entries: dict[str, tuple[str, int]] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if not sep or not key or not value:
                raise ConfigError(
                    f"{name}:{lineno}: expected 'key = value', got {raw.strip()!r}"
                )
            if key in self.entries:
                first = self.entries[key][1]
                raise ConfigError(
                    f"{name}:{lineno}: duplicate key {key!r} (first set on line {first})"
                )
            self.entries[key] = (value, lineno)
        self.consumed: set[str] = set()

    def has(self, key: str) -> bool:
        return key in self.entries

    def _raw(self, key: str) -> tuple[str, int]:
        self.consumed.add(key)
        return self.entries[key]

    def get_str(self, key: str, default: str | None) -> str | None:
        if key not in self.entries:
            return default
        return self._raw(key)[0]

    def get_choice(self, key: str, choices: tuple[str, ...], default: str) -> str:
        if key not in self.entries:
            return default
        value, lineno = self._raw(key)
        if value not in choices:
            raise ConfigError(
                f"{self.name}:{lineno}: {key} must be one of {', '.join(choices)}; got {value!r}"
            )
        return value

    def get_int(self, key: str, default: int | None = None) -> int | None:
        if key not in self.entries:
            return default
        value, lineno = self._raw(key)
        try:
            return int(value, 10)
        except ValueError:
            raise ConfigError(
                f"{self.name}:{lineno}: {key} must be an integer, got {value!r}"
            ) from None

    def require_int(self, key: str) -> int:
        if key not in self.entries:
            raise ConfigError(f"{self.name}: missing required key {key!r}")
        value, lineno = self._raw(key)
        try:
            return int(value, 10)
        except ValueError:
            raise ConfigError(
                f"{self.name}:{lineno}: {key} must be an integer, got {value!r}"
            ) from None

    def get_float(self, key: str, default: float | None = None) -> float | None:
        if key not in self.entries:
            return default
        value, lineno = self._raw(key)
        try:
            out = float(value)
        except ValueError:
            raise ConfigError(
                f"{self.name}:{lineno}: {key} must be a number, got {value!r}"
            ) from None
        return out

    def require_float(self, key: str) -> float:
        if key not in self.entries:
            raise ConfigError(f"{self.name}: missing required key {key!r}")
        return self.get_float(key)

    def reject_leftovers(self) -> None:
        for key, (_, lineno) in self.entries.items():
            if key in self.consumed:
                continue
            if key in _ALL_KEYS:
                raise ConfigError(
                    f"{self.name}:{lineno}: key {key!r} does not apply to this "
                    f"shape/centre combination"
                )
            raise ConfigError(f"{self.name}:{lineno}: unknown key {key!r}")


def _build_shape(table: _KeyTable, kind: str) -> Shape:
    if kind == "line":
        return Line(m=table.require_float("m"), c=table.require_float("c"))
    if kind == "ellipse":
        return Ellipse(a=table.require_float("a"), b=table.require_float("b"))
    if kind == "circle":
        return Circle(r0=table.require_float("r0"))
    return Square(a=table.require_float("a"))


def _build_center(table: _KeyTable, kind: str) -> CenterTrajectory:
    if kind == "static":
        return StaticCenter(
            position=(
                table.get_float("center_x", 0.0),
                table.get_float("center_y", 0.0),
            )
        )
    if kind == "linear":
        return LinearCenter(
            start=(table.require_float("center_x"), table.require_float("center_y")),
            velocity=(
                table.require_float("center_vx"),
                table.require_float("center_vy"),
            ),
        )
    return CircularCenter(
        radius=table.require_float("center_radius"),
        period=table.require_int("center_period"),
    )


def parse_scenario(text: str, name: str = "<scenario>") -> Scenario:
    """Parse scenario text; raises ``ConfigError`` with file/line context."""
    table = _KeyTable(text, name)

    schema = table.require_int("schema")
    if schema != SCHEMA_VERSION:
        raise ConfigError(
            f"{name}: unsupported schema version {schema} (supported: {SCHEMA_VERSION})"
        )

    if not table.has("shape"):
        raise ConfigError(f"{name}: missing required key 'shape'")
    shape_kind = table.get_choice("shape", tuple(_SHAPE_KEYS), "circle")
    center_kind = table.get_choice("center", tuple(_CENTER_KEYS), "static")

    try:
        shape = _build_shape(table, shape_kind)
        center = _build_center(table, center_kind)
        if center_kind != "static" and not isinstance(shape, Circle):
            raise ConfigError(
                f"{name}: centre {center_kind!r} requires shape = circle, got {shape_kind!r}"
            )
        init = InitSpec(
            count=table.require_int("count"),
            lower=table.get_float("lower", -5.0),
            upper=table.get_float("upper", 5.0),
            seed=table.require_int("seed"),
        )
        params = DynamicsParams(
            k1=table.get_float("k1", 0.1),
            k2=table.get_float("k2", 2.0),
            sigma=table.get_float("sigma", 3.5),
            beta=table.get_float("beta", 1.2),
            r=table.get_float("r", 0.1),
        )
        defaults = Convergence()
        integrator = IntegratorConfig(
            dt=table.get_float("dt", 1.0),
            scheme=table.get_choice("scheme", ("euler", "rk4"), "euler"),
            max_steps=table.get_int("max_steps", 2000),
            convergence=Convergence(
                vel_tol=table.get_float("vel_tol", defaults.vel_tol),
                shape_tol=table.get_float("shape_tol", defaults.shape_tol),
                window=table.get_int("window", defaults.window),
            ),
        )
        output = OutputSpec(
            trajectory_path=table.get_str("trajectory_path", None),
            metrics_path=table.get_str("metrics_path", None),
            snapshot_stride=table.get_int("snapshot_stride", None),
        )
    except ConfigError as exc:
        msg = str(exc)
        raise ConfigError(msg if msg.startswith(name) else f"{name}: {msg}") from None

    table.reject_leftovers()
    return Scenario(
        init=init,
        params=params,
        shape=shape,
        center=center,
        integrator=integrator,
        output=output,
    )


def load_scenario(path) -> Scenario:
    """Read and parse a scenario file; I/O errors propagate as ``OSError``."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    return parse_scenario(text, name=str(p))


def _fmt(x: float) -> str:
    return repr(float(x))


def serialize_scenario(s: Scenario) -> str:
    """Canonical text for a scenario; ``parse_scenario`` inverts it exactly."""
    lines = [f"schema = {SCHEMA_VERSION}"]
    if isinstance(s.shape, Line):
        lines += ["shape = line", f"m = {_fmt(s.shape.m)}", f"c = {_fmt(s.shape.c)}"]
    elif isinstance(s.shape, Ellipse):
        lines += ["shape = ellipse", f"a = {_fmt(s.shape.a)}", f"b = {_fmt(s.shape.b)}"]
    elif isinstance(s.shape, Circle):
        lines += ["shape = circle", f"r0 = {_fmt(s.shape.r0)}"]
    else:
        lines += ["shape = square", f"a = {_fmt(s.shape.a)}"]
    lines += [
        f"count = {s.init.count}",
        f"seed = {s.init.seed}",
        f"lower = {_fmt(s.init.lower)}",
        f"upper = {_fmt(s.init.upper)}",
        f"k1 = {_fmt(s.params.k1)}",
        f"k2 = {_fmt(s.params.k2)}",
        f"sigma = {_fmt(s.params.sigma)}",
        f"beta = {_fmt(s.params.beta)}",
        f"r = {_fmt(s.params.r)}",
        f"dt = {_fmt(s.integrator.dt)}",
        f"scheme = {s.integrator.scheme}",
        f"max_steps = {s.integrator.max_steps}",
        f"vel_tol = {_fmt(s.integrator.convergence.vel_tol)}",
        f"shape_tol = {_fmt(s.integrator.convergence.shape_tol)}",
        f"window = {s.integrator.convergence.window}",
    ]
    if isinstance(s.center, StaticCenter):
        lines += [
            "center = static",
            f"center_x = {_fmt(s.center.position[0])}",
            f"center_y = {_fmt(s.center.position[1])}",
        ]
    elif isinstance(s.center, LinearCenter):
        lines += [
            "center = linear",
            f"center_x = {_fmt(s.center.start[0])}",
            f"center_y = {_fmt(s.center.start[1])}",
            f"center_vx = {_fmt(s.center.velocity[0])}",
            f"center_vy = {_fmt(s.center.velocity[1])}",
        ]
    else:
        lines += [
            "center = circular",
            f"center_radius = {_fmt(s.center.radius)}",
            f"center_period = {s.center.period}",
        ]
    if s.output.snapshot_stride is not None:
        lines.append(f"snapshot_stride = {s.output.snapshot_stride}")
    if s.output.trajectory_path is not None:
        lines.append(f"trajectory_path = {s.output.trajectory_path}")
    if s.output.metrics_path is not None:
        lines.append(f"metrics_path = {s.output.metrics_path}")
    return "\n".join(lines) + "\n"


_FLOAT_OVERRIDES = {
    "lower": lambda s, v: replace(s, init=replace(s.init, lower=v)),
    "upper": lambda s, v: replace(s, init=replace(s.init, upper=v)),
    "k1": lambda s, v: replace(s, params=replace(s.params, k1=v)),
    "k2": lambda s, v: replace(s, params=replace(s.params, k2=v)),
    "sigma": lambda s, v: replace(s, params=replace(s.params, sigma=v)),
    "beta": lambda s, v: replace(s, params=replace(s.params, beta=v)),
    "r": lambda s, v: replace(s, params=replace(s.params, r=v)),
    "dt": lambda s, v: replace(s, integrator=replace(s.integrator, dt=v)),
    "vel_tol": lambda s, v: replace(
        s,
        integrator=replace(
            s.integrator, convergence=replace(s.integrator.convergence, vel_tol=v)
        ),
    ),
    "shape_tol": lambda s, v: replace(
        s,
        integrator=replace(
            s.integrator, convergence=replace(s.integrator.convergence, shape_tol=v)
        ),
    ),
}

_INT_OVERRIDES = {
    "count": lambda s, v: replace(s, init=replace(s.init, count=v)),
    "seed": lambda s, v: replace(s, init=replace(s.init, seed=v)),
    "max_steps": lambda s, v: replace(s, integrator=replace(s.integrator, max_steps=v)),
    "window": lambda s, v: replace(
        s,
        integrator=replace(
            s.integrator, convergence=replace(s.integrator.convergence, window=v)
        ),
    ),
}

_GEOMETRY_OVERRIDES = {
    "m": (Line, lambda s, v: replace(s, shape=replace(s.shape, m=v))),
    "c": (Line, lambda s, v: replace(s, shape=replace(s.shape, c=v))),
    "a": ((Ellipse, Square), lambda s, v: replace(s, shape=replace(s.shape, a=v))),
    "b": (Ellipse, lambda s, v: replace(s, shape=replace(s.shape, b=v))),
    "r0": (Circle, lambda s, v: replace(s, shape=replace(s.shape, r0=v))),
}


def apply_override(s: Scenario, key: str, raw: str) -> Scenario:
    """Return a copy of ``s`` with one scenario key replaced.

    ``raw`` is parsed like a scenario value.  Used by the CLI sweep; supports
    the numeric keys (dynamics, init, integrator and the geometry keys that
    match the scenario's shape).
    """
    if key in _FLOAT_OVERRIDES:
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"{key} must be a number, got {raw!r}") from None
        return _FLOAT_OVERRIDES[key](s, value)
    if key in _INT_OVERRIDES:
        try:
            value = int(raw, 10)
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {raw!r}") from None
        return _INT_OVERRIDES[key](s, value)
    if key in _GEOMETRY_OVERRIDES:
        kinds, builder = _GEOMETRY_OVERRIDES[key]
        if not isinstance(s.shape, kinds):
            raise ConfigError(
                f"key {key!r} does not apply to shape {type(s.shape).__name__.lower()}"
            )
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"{key} must be a number, got {raw!r}") from None
        return builder(s, value)
    raise ConfigError(f"cannot sweep over key {key!r}")


def run_scenario(s: Scenario, backend=None) -> TrajectoryRecord:
    """Initialise the swarm from the scenario and integrate it."""
    state = init_swarm(s.init)
    return run(
        state,
        s.params,
        s.shape,
        s.integrator,
        center=s.center,
        stride=s.output.snapshot_stride,
        backend=backend,
    )


def _atomic_write(path, text: str) -> None:
    p = Path(path)
    fd, tmp = tempfile.mkstemp(
        dir=str(p.parent) if str(p.parent) else ".", prefix=p.name, suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, p)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def export_trajectory(record: TrajectoryRecord, path) -> None:
    """Write ``time,agent_id,x1,x2`` rows, one per agent per snapshot.

    Snapshot-major, agent-minor; floats formatted with ``repr`` so reading
    the file back reproduces the exact values.
    """
    lines = ["time,agent_id,x1,x2"]
    times = record.times
    pos = record.positions
    for snap in range(pos.shape[0]):
        t = _fmt(times[snap])
        for agent in range(pos.shape[1]):
            lines.append(
                f"{t},{agent},{_fmt(pos[snap, agent, 0])},{_fmt(pos[snap, agent, 1])}"
            )
    _atomic_write(path, "\n".join(lines) + "\n")


def export_metrics(record: TrajectoryRecord, path) -> None:
    """Write one metrics row per snapshot; columns are ``time`` plus
    ``record.metric_names`` (tracking columns appear only for moving-centre
    runs)."""
    lines = ["time," + ",".join(record.metric_names)]
    for snap in range(record.metrics.shape[0]):
        cells = [_fmt(record.times[snap])]
        cells += [_fmt(v) for v in record.metrics[snap]]
        lines.append(",".join(cells))
    _atomic_write(path, "\n".join(lines) + "\n")

"""Time stepping, convergence detection and trajectory recording.

One step advances every agent synchronously from the same pre-step state.
Explicit Euler is the default (one step is one iteration of the dynamics);
classical RK4 is available as an accuracy reference and re-evaluates the
field — including nearest neighbours and the moving centre — at every stage.

A run iterates until the convergence window fires, the step budget runs out,
or a non-finite velocity aborts it.  Runs are deterministic: identical inputs
produce identical records, byte for byte once exported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .backend import get_backend
from .dynamics import nearest_neighbors
from .shapes import Circle, Shape, initial_direction, shape_code
from .state import ConfigError, DynamicsParams, SwarmState
from .tracking import CenterTrajectory, CircularCenter, LinearCenter, StaticCenter

__all__ = [
    "TERMINAL_CONVERGED",
    "TERMINAL_MAX_STEPS",
    "TERMINAL_DIVERGED",
    "DivergedError",
    "Convergence",
    "IntegratorConfig",
    "TrajectoryRecord",
    "auto_stride",
    "step",
    "converged",
    "run",
]

TERMINAL_CONVERGED = "converged"
TERMINAL_MAX_STEPS = "max_steps"
TERMINAL_DIVERGED = "diverged"

SCHEMES = ("euler", "rk4")

BASE_METRICS = ("shape_error", "max_shape_error", "spacing_cv", "max_speed")
TRACK_METRICS = BASE_METRICS + ("tracking_error", "centroid_offset")


class DivergedError(RuntimeError):
    """A step produced a non-finite velocity or position."""


@dataclass(frozen=True)
class Convergence:
    """Windowed stopping rule.

    A state passes the instantaneous test when its largest per-agent speed is
    at most ``vel_tol`` and its mean distance to the shape is at most
    ``shape_tol`` (both inclusive).  A run stops once ``window`` consecutive
    states pass.

    The defaults are calibrated against what the default parameter set
    actually does.  The swarm never comes fully to rest: the
    constant-magnitude repulsion keeps the largest per-agent speed hovering
    just above ``r`` even in a settled formation (about 0.10 with ``r=0.1``),
    so ``vel_tol`` sits slightly above that floor — a much smaller value
    would never fire.  ``shape_tol`` is a genuine formation-accuracy gate:
    line formations settle well inside it, while circle, ellipse and square
    formations equilibrate visibly inside the shape (mean offsets roughly
    0.17, 0.39 and 0.38 for the stock geometries) and therefore terminate at
    the step budget instead; widen ``shape_tol`` past those offsets if
    "reached its steady band" is the stopping behaviour you want.
    """

    vel_tol: float = 0.11
    shape_tol: float = 0.05
    window: int = 10

    def __post_init__(self):
        for name in ("vel_tol", "shape_tol"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v < 0.0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")
            object.__setattr__(self, name, v)
        if not isinstance(self.window, (int, np.integer)) or isinstance(
            self.window, bool
        ):
            raise ConfigError(f"window must be an integer, got {self.window!r}")
        object.__setattr__(self, "window", int(self.window))
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1.0
    scheme: str = "euler"
    max_steps: int = 2000
    convergence: Convergence = field(default_factory=Convergence)

    def __post_init__(self):
        dt = float(self.dt)
        if not np.isfinite(dt) or dt <= 0.0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        object.__setattr__(self, "dt", dt)
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not isinstance(self.max_steps, (int, np.integer)) or isinstance(
            self.max_steps, bool
        ):
            raise ConfigError(f"max_steps must be an integer, got {self.max_steps!r}")
        object.__setattr__(self, "max_steps", int(self.max_steps))
        if self.max_steps < 1:
            raise ConfigError(f"max_steps must be >= 1, got {self.max_steps}")
        if not isinstance(self.convergence, Convergence):
            raise ConfigError("convergence must be a Convergence instance")


@dataclass(eq=False)
class TrajectoryRecord:
    """Recorded snapshots of one run.

    ``positions`` has shape (S, M, 2) for S snapshots; ``metrics`` has one
    row per snapshot with columns ``metric_names``.  The initial and terminal
    states are always present; between them every ``stride``-th state is
    kept.  ``steps_taken`` counts integration steps actually executed, so the
    terminal state is state number ``steps_taken``.
    """

    times: np.ndarray
    positions: np.ndarray
    metrics: np.ndarray
    metric_names: tuple[str, ...]
    terminal_reason: str
    steps_taken: int
    coincidence_events: int
    dt: float

    @property
    def snapshots(self) -> int:
        return self.positions.shape[0]

    def state_at(self, index: int) -> SwarmState:
        return SwarmState(self.positions[index], self.times[index])

    def final_state(self) -> SwarmState:
        return self.state_at(-1)

    def final_metric(self, name: str) -> float:
        return float(self.metrics[-1, self.metric_names.index(name)])


def auto_stride(max_steps: int) -> int:
    """Default snapshot stride: every state up to 500 steps, else every 10th."""
    return 1 if max_steps <= 500 else 10


def _initial_dirs(m: int) -> np.ndarray:
    return np.stack([initial_direction(i, m) for i in range(m)])


def _field(impl, P, dirs, t, params, code, s0, s1, center):
    c = center.at(t)
    v, events = impl.velocity_field(
        P,
        dirs,
        params.k1,
        params.k2,
        params.sigma,
        params.beta,
        params.r,
        code,
        s0,
        s1,
        float(c[0]),
        float(c[1]),
    )
    return v, events, c


def _advance(impl, P, dirs, t, cfg, params, code, s0, s1, center, v0):
    """One step from (P, t) given the already-evaluated field v0 there.

    Returns the new positions and the number of coincidence events from any
    extra stage evaluations (zero for Euler).
    """
    dt = cfg.dt
    if cfg.scheme == "euler":
        return P + dt * v0, 0
    events = 0
    k2v, e, _ = _field(impl, P + 0.5 * dt * v0, dirs, t + 0.5 * dt, params, code, s0, s1, center)
    events += e
    k3v, e, _ = _field(impl, P + 0.5 * dt * k2v, dirs, t + 0.5 * dt, params, code, s0, s1, center)
    events += e
    k4v, e, _ = _field(impl, P + dt * k3v, dirs, t + dt, params, code, s0, s1, center)
    events += e
    return P + (dt / 6.0) * (v0 + 2.0 * k2v + 2.0 * k3v + k4v), events


def step(
    state: SwarmState,
    params: DynamicsParams,
    shape: Shape,
    cfg: IntegratorConfig,
    center: CenterTrajectory | None = None,
    dirs: np.ndarray | None = None,
    backend=None,
) -> SwarmState:
    """Advance one step of ``cfg.dt``; synchronous across agents; pure.

    ``dirs`` supplies per-agent fallback directions for positions exactly at
    the shape centre (defaults to the id-based initial directions).  Raises
    ``DivergedError`` on a non-finite velocity or position.
    """
    impl = get_backend(backend)
    if center is None:
        center = StaticCenter()
    code, s0, s1 = shape_code(shape)
    m = state.count
    if dirs is None:
        dirs = _initial_dirs(m)
    else:
        dirs = np.asarray(dirs, dtype=np.float64)
        if dirs.shape != (m, 2):
            raise ConfigError(f"dirs must have shape ({m}, 2), got {dirs.shape}")
    v0, _, _ = _field(impl, state.positions, dirs, state.time, params, code, s0, s1, center)
    if not np.isfinite(v0).all():
        raise DivergedError("velocity is non-finite; the dynamics diverged")
    new_p, _ = _advance(
        impl, state.positions, dirs, state.time, cfg, params, code, s0, s1, center, v0
    )
    if not np.isfinite(new_p).all():
        raise DivergedError("position is non-finite; the dynamics diverged")
    return SwarmState(new_p, state.time + cfg.dt)


def converged(
    state: SwarmState,
    shape: Shape,
    params: DynamicsParams,
    cfg: IntegratorConfig,
    center: CenterTrajectory | None = None,
    backend=None,
) -> bool:
    """Instantaneous convergence test for a single state.

    True when the largest per-agent speed is at most ``vel_tol`` and the mean
    distance to the shape is at most ``shape_tol``, both inclusive, so a state
    sitting exactly on the thresholds counts.  ``run`` stops once this holds
    for ``window`` consecutive states.  A state with non-finite velocity is
    never converged.
    """
    impl = get_backend(backend)
    if center is None:
        center = StaticCenter()
    code, s0, s1 = shape_code(shape)
    v, _, c = _field(
        impl,
        state.positions,
        _initial_dirs(state.count),
        state.time,
        params,
        code,
        s0,
        s1,
        center,
    )
    if not np.isfinite(v).all():
        return False
    conv = cfg.convergence
    if float(np.sqrt((v**2).sum(axis=1)).max()) > conv.vel_tol:
        return False
    dists = impl.shape_distances(state.positions, code, s0, s1, float(c[0]), float(c[1]))
    return float(dists.mean()) <= conv.shape_tol


def run(
    init: SwarmState,
    params: DynamicsParams,
    shape: Shape,
    cfg: IntegratorConfig,
    center: CenterTrajectory | None = None,
    stride: int | None = None,
    backend=None,
) -> TrajectoryRecord:
    """Integrate until convergence, the step budget, or divergence.

    Records the initial state, every ``stride``-th state and always the
    terminal state (``stride=None`` applies :func:`auto_stride`).  Metric
    rows carry the tracking columns exactly when ``center`` actually moves,
    i.e. is a :class:`LinearCenter` or :class:`CircularCenter`; those centres
    require the circle shape.

    On a non-finite velocity the run stops with ``terminal_reason =
    "diverged"``; the offending state is still recorded (its ``max_speed``
    metric is then non-finite).
    """
    impl = get_backend(backend)
    if center is None:
        center = StaticCenter()
    track = isinstance(center, (LinearCenter, CircularCenter))
    if track and not isinstance(shape, Circle):
        raise ConfigError("a moving centre requires the circle shape")
    code, s0, s1 = shape_code(shape)
    conv = cfg.convergence
    if stride is None:
        stride = auto_stride(cfg.max_steps)
    else:
        if not isinstance(stride, (int, np.integer)) or isinstance(stride, bool):
            raise ConfigError(f"stride must be an integer, got {stride!r}")
        stride = int(stride)
        if stride < 1:
            raise ConfigError(f"stride must be >= 1, got {stride}")

    m = init.count
    p = np.array(init.positions)  # writable working copy
    t0 = init.time
    static = isinstance(center, StaticCenter)
    c_static = center.at(0.0) if static else None

    # Degenerate-ray fallbacks.  dirs[i] must hold agent i's direction at the
    # most recent state where it was off-centre (id-based before any step).
    # Positions land exactly on the centre almost never, so instead of
    # renormalising every step the update is deferred: keep the previous
    # state, and refresh only the rows that are degenerate right now.
    dirs = _initial_dirs(m)
    p_prev: np.ndarray | None = None
    c_prev: np.ndarray | None = None

    times: list[float] = []
    snaps: list[np.ndarray] = []
    rows: list[list[float]] = []
    names = TRACK_METRICS if track else BASE_METRICS

    def metrics_row(pos, c, dists, max_speed) -> list[float]:
        if m >= 2:
            nn = nearest_neighbors(pos)
            nd = np.sqrt(((pos - pos[nn]) ** 2).sum(axis=1))
            mean = nd.mean()
            cv = 0.0 if mean == 0.0 else float(nd.std() / mean)
        else:
            cv = 0.0  # spacing is vacuously uniform for one agent
        row = [float(dists.mean()), float(dists.max()), cv, max_speed]
        if track:
            delta = pos.mean(axis=0) - c
            row += [float(dists.mean()), float(np.sqrt((delta**2).sum()))]
        return row

    coincidences = 0
    streak = 0
    terminal = TERMINAL_MAX_STEPS
    steps_taken = cfg.max_steps

    for k in range(cfg.max_steps + 1):
        t = t0 + k * cfg.dt
        c = c_static if static else center.at(t)
        cx, cy = float(c[0]), float(c[1])

        degenerate = np.all(p == c, axis=1)
        if degenerate.any() and p_prev is not None:
            # bring the stale fallback rows up to date from the previous
            # state; rows degenerate there too keep their older direction
            rel = p_prev[degenerate] - c_prev
            nrm = np.sqrt((rel**2).sum(axis=1))
            fresh = nrm != 0.0
            upd = dirs[degenerate]
            upd[fresh] = rel[fresh] / nrm[fresh, None]
            dirs[degenerate] = upd

        v, events = impl.velocity_field(
            p,
            dirs,
            params.k1,
            params.k2,
            params.sigma,
            params.beta,
            params.r,
            code,
            s0,
            s1,
            cx,
            cy,
        )
        coincidences += events
        speed_sq = np.einsum("ij,ij->i", v, v)
        max_sq = float(speed_sq.max())
        if np.isfinite(max_sq):
            max_speed = float(np.sqrt(max_sq))
        else:
            max_speed = float(np.sqrt(speed_sq).max())  # inf, or nan if diverged
            if not np.isfinite(v).all():
                terminal = TERMINAL_DIVERGED
                steps_taken = k
                dists = impl.shape_distances(p, code, s0, s1, cx, cy)
                times.append(t)
                snaps.append(p.copy())
                rows.append(metrics_row(p, c, dists, max_speed))
                break

        dists = None
        ok = max_speed <= conv.vel_tol
        if ok:
            dists = impl.shape_distances(p, code, s0, s1, cx, cy)
            ok = float(dists.mean()) <= conv.shape_tol
        streak = streak + 1 if ok else 0

        hit_window = streak >= conv.window
        is_last = hit_window or k == cfg.max_steps
        if k % stride == 0 or is_last:
            if dists is None:
                dists = impl.shape_distances(p, code, s0, s1, cx, cy)
            times.append(t)
            snaps.append(p.copy())
            rows.append(metrics_row(p, c, dists, max_speed))
        if hit_window:
            terminal = TERMINAL_CONVERGED
            steps_taken = k
            break
        if k == cfg.max_steps:
            break

        p_prev, c_prev = p, c
        p, events = _advance(impl, p, dirs, t, cfg, params, code, s0, s1, center, v)
        coincidences += events

    return TrajectoryRecord(
        times=np.array(times),
        positions=np.stack(snaps),
        metrics=np.array(rows),
        metric_names=names,
        terminal_reason=terminal,
        steps_taken=steps_taken,
        coincidence_events=coincidences,
        dt=cfg.dt,
    )

"""Core value types: positions, swarm state, dynamics constants, seeding.

Everything here is an immutable value object.  Arrays carried by a state are
copied on construction and marked read-only, so states can be shared, cached,
and compared without defensive copies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "ConfigError",
    "Vec2",
    "vec2",
    "AgentState",
    "SwarmState",
    "DynamicsParams",
    "InitSpec",
    "init_swarm",
]

#: A length-2 float64 ndarray. Used for positions, velocities and directions.
Vec2 = np.ndarray

MAX_SEED = 2**64 - 1


class ConfigError(ValueError):
    """A configuration value violates a documented invariant."""


def vec2(x1: float, x2: float) -> Vec2:
    """Build a finite 2-vector; rejects NaN and infinity."""
    v = np.array([float(x1), float(x2)], dtype=np.float64)
    if not np.isfinite(v).all():
        raise ConfigError(f"vector components must be finite, got ({x1}, {x2})")
    return v


def _frozen_positions(positions) -> np.ndarray:
    pos = np.array(positions, dtype=np.float64, copy=True)
    if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] < 1:
        raise ConfigError(
            f"positions must have shape (M, 2) with M >= 1, got {pos.shape}"
        )
    if not np.isfinite(pos).all():
        raise ConfigError("positions must be finite (no NaN/inf)")
    pos.flags.writeable = False
    return pos


class AgentState(NamedTuple):
    """One agent: contiguous integer id plus planar position."""

    id: int
    position: Vec2


@dataclass(frozen=True, eq=False)
class SwarmState:
    """Positions of all agents at one instant.

    ``positions`` has shape (M, 2); row i belongs to agent i.  Agent ids are
    implicit, contiguous and stable for the lifetime of a run.
    """

    positions: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "positions", _frozen_positions(self.positions))
        t = float(self.time)
        if not np.isfinite(t) or t < 0.0:
            raise ConfigError(f"time must be finite and >= 0, got {self.time}")
        object.__setattr__(self, "time", t)

    @property
    def count(self) -> int:
        return self.positions.shape[0]

    @property
    def agents(self) -> list[AgentState]:
        return [AgentState(i, p) for i, p in enumerate(self.positions)]

    def replace(self, positions=None, time=None) -> "SwarmState":
        """Value-style update returning a new state."""
        return SwarmState(
            self.positions if positions is None else positions,
            self.time if time is None else time,
        )


@dataclass(frozen=True)
class DynamicsParams:
    """Gains and profile constants of the steering field.

    ``k1`` scales pairwise attraction between agents, ``k2`` attraction toward
    the shape target, ``sigma``/``beta`` shape the saturating distance profile
    ``d / (sigma^2 + d^2)**beta``, and ``r`` is the constant magnitude of the
    nearest-neighbour repulsion.  The defaults are the stable-regime values
    used by every shipped scenario.
    """

    k1: float = 0.1
    k2: float = 2.0
    sigma: float = 3.5
    beta: float = 1.2
    r: float = 0.1

    def __post_init__(self):
        for name in ("k1", "k2", "sigma", "beta"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v <= 0.0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}")
            object.__setattr__(self, name, v)
        r = float(self.r)
        if not np.isfinite(r) or r < 0.0:
            raise ConfigError(f"r must be >= 0, got {self.r}")
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class InitSpec:
    """How to scatter the initial swarm: ``count`` points drawn uniformly at
    random from the square [lower, upper] x [lower, upper]."""

    count: int
    lower: float = -5.0
    upper: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.count, (int, np.integer)) or isinstance(
            self.count, bool
        ):
            raise ConfigError(f"count must be an integer, got {self.count!r}")
        object.__setattr__(self, "count", int(self.count))
        if self.count < 1:
            raise ConfigError(f"count must be >= 1, got {self.count}")
        lo, hi = float(self.lower), float(self.upper)
        if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
            raise ConfigError(
                f"init bounds must be finite with lower < upper, got [{self.lower}, {self.upper}]"
            )
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))
        if not 0 <= self.seed <= MAX_SEED:
            raise ConfigError(f"seed must be in [0, 2**64), got {self.seed}")


def init_swarm(spec: InitSpec) -> SwarmState:
    """Scatter agents uniformly at random; a pure function of the spec.

    Uses numpy's PCG64 generator seeded with ``spec.seed``.  Coordinates are
    drawn in row order (agent 0 x1, agent 0 x2, agent 1 x1, ...), so identical
    specs yield bit-identical swarms on any platform.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    pos = rng.uniform(spec.lower, spec.upper, size=(spec.count, 2))
    return SwarmState(pos, 0.0)

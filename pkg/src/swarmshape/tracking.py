"""Moving-centre trajectories and the recentred circle target.

A centre trajectory says where the point to be encircled sits at a given
time: fixed, sliding at constant velocity, or orbiting the origin.  The
tracking target is simply the circle target evaluated in the centre's frame,
so a static centre at the origin reproduces plain circle formation exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .shapes import circle_target
from .state import ConfigError, Vec2

__all__ = [
    "StaticCenter",
    "LinearCenter",
    "CircularCenter",
    "CenterTrajectory",
    "center_at",
    "tracking_target",
]


def _finite_pair(value, what: str) -> tuple[float, float]:
    try:
        x, y = value
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a pair of floats, got {value!r}") from None
    x, y = float(x), float(y)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ConfigError(f"{what} must be finite, got {value!r}")
    return x, y


@dataclass(frozen=True)
class StaticCenter:
    """A centre that never moves; the origin unless told otherwise."""

    position: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(
            self, "position", _finite_pair(self.position, "centre position")
        )

    def at(self, t: float) -> Vec2:
        return np.array(self.position)


@dataclass(frozen=True)
class LinearCenter:
    """Constant-velocity drift: ``start + velocity * t``."""

    start: tuple[float, float]
    velocity: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "start", _finite_pair(self.start, "centre start"))
        object.__setattr__(
            self, "velocity", _finite_pair(self.velocity, "centre velocity")
        )

    def at(self, t: float) -> Vec2:
        return np.array(
            [
                self.start[0] + self.velocity[0] * t,
                self.start[1] + self.velocity[1] * t,
            ]
        )


@dataclass(frozen=True)
class CircularCenter:
    """Orbit of the origin with the given radius, starting at (radius, 0).

    ``period`` is the integer number of iterations per full turn.
    """

    radius: float
    period: int

    def __post_init__(self):
        v = float(self.radius)
        if not math.isfinite(v) or v <= 0.0:
            raise ConfigError(f"orbit radius must be > 0, got {self.radius}")
        object.__setattr__(self, "radius", v)
        if not isinstance(self.period, (int, np.integer)) or isinstance(
            self.period, bool
        ):
            raise ConfigError(f"orbit period must be an integer, got {self.period!r}")
        object.__setattr__(self, "period", int(self.period))
        if self.period < 1:
            raise ConfigError(f"orbit period must be >= 1, got {self.period}")

    def at(self, t: float) -> Vec2:
        w = 2.0 * math.pi * t / self.period
        return np.array([self.radius * math.cos(w), self.radius * math.sin(w)])


CenterTrajectory = Union[StaticCenter, LinearCenter, CircularCenter]


def center_at(trajectory: CenterTrajectory, t: float) -> Vec2:
    """Centre position at time ``t`` (must be >= 0)."""
    t = float(t)
    if not math.isfinite(t) or t < 0.0:
        raise ValueError(f"time must be finite and >= 0, got {t}")
    return trajectory.at(t)


def tracking_target(pos, center, r0: float, fallback_dir=None) -> Vec2:
    """Circle target recentred at ``center``.

    Exactly ``center + circle_target(pos - center, r0)``; with the centre at
    the origin this is bit-identical to the plain circle target.
    """
    cx, cy = float(center[0]), float(center[1])
    rel = (float(pos[0]) - cx, float(pos[1]) - cy)
    t = circle_target(rel, r0, fallback_dir)
    return np.array([cx + t[0], cy + t[1]])

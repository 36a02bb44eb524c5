"""Shape target generators and exact point-to-shape distances.

A target generator maps an agent position to the point on the shape that the
agent is steered toward.  The line uses orthogonal projection.  Circle and
square project radially, along the ray from the shape centre through the
position.  The ellipse uses the quadrant-preserving angle map
``theta = atan2(a * x2, b * x1)``: not a true radial projection, but it always
lands on the ellipse and reduces to the radial map when ``a == b``.

A position exactly at the shape centre lies on no ray, so the radial
generators take an optional ``fallback_dir`` unit vector for that case.
Callers that track per-agent history (the integrator does) pass the agent's
direction from the previous step, seeded with
``initial_direction(agent_id, count)``; without a fallback the +x axis is
used.

Distances are exact Euclidean distances to the shape as a point set (not the
distance to the radial target).  For the ellipse no closed form exists; see
``ellipse_distance`` for the bracketed search used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .state import ConfigError, Vec2

__all__ = [
    "initial_direction",
    "line_target",
    "ellipse_target",
    "circle_target",
    "square_target",
    "line_distance",
    "ellipse_distance",
    "circle_distance",
    "square_distance",
    "Line",
    "Ellipse",
    "Circle",
    "Square",
    "Shape",
    "distance_to_shape",
    "shape_code",
]

_QUARTER_PI = math.pi / 4.0
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # golden-section shrink ratio

#: Width to which the golden-section bracket is shrunk in ellipse_distance.
ELLIPSE_DISTANCE_TOL = 1e-10


def initial_direction(agent_id: int, count: int) -> Vec2:
    """Deterministic unit direction at angle ``2*pi*agent_id/count``.

    Used as the degenerate-ray fallback before an agent has taken any step.
    """
    ang = 2.0 * math.pi * agent_id / count
    return np.array([math.cos(ang), math.sin(ang)])


def _ray(pos, fallback_dir) -> tuple[float, float]:
    """Coordinates defining the projection ray; falls back when pos == (0, 0)."""
    x1, x2 = float(pos[0]), float(pos[1])
    if x1 == 0.0 and x2 == 0.0:
        if fallback_dir is None:
            return 1.0, 0.0
        return float(fallback_dir[0]), float(fallback_dir[1])
    return x1, x2


def line_target(pos, m: float, c: float) -> Vec2:
    """Orthogonal projection of ``pos`` onto the line x2 = m*x1 + c."""
    x1, x2 = float(pos[0]), float(pos[1])
    denom = 1.0 + m * m
    return np.array(
        [(x1 + m * x2 - m * c) / denom, (m * x1 + m * m * x2 + c) / denom]
    )


def ellipse_target(pos, a: float, b: float, fallback_dir=None) -> Vec2:
    """Point ``(a*cos t, b*sin t)`` with ``t = atan2(a*x2, b*x1)``.

    Maps every open quadrant onto the ellipse arc in the same quadrant and
    fixes every point already on the ellipse.
    """
    x1, x2 = _ray(pos, fallback_dir)
    t = math.atan2(a * x2, b * x1)
    return np.array([a * math.cos(t), b * math.sin(t)])


def circle_target(pos, r0: float, fallback_dir=None) -> Vec2:
    """Radial projection onto the circle of radius ``r0``.

    Implemented as the ``a == b`` ellipse map so the two shapes agree
    bit-for-bit.
    """
    return ellipse_target(pos, r0, r0, fallback_dir)


def square_target(pos, a: float, fallback_dir=None) -> Vec2:
    """Radial projection onto the axis-aligned square ``max(|x1|, |x2|) = a``.

    The plane splits into four half-open angular sectors, one per side; each
    sector boundary (a corner ray) belongs to the counter-clockwise side, so
    every direction has exactly one target and the corner rays map to the
    corners themselves.
    """
    x1, x2 = _ray(pos, fallback_dir)
    phi = math.atan2(x2, x1)
    if -_QUARTER_PI <= phi < _QUARTER_PI:  # right side, x1 > 0 here
        return np.array([a, a * x2 / x1])
    if _QUARTER_PI <= phi < 3.0 * _QUARTER_PI:  # top side, x2 > 0 here
        return np.array([a * x1 / x2, a])
    if -3.0 * _QUARTER_PI <= phi < -_QUARTER_PI:  # bottom side, x2 < 0 here
        return np.array([-a * x1 / x2, -a])
    return np.array([-a, -a * x2 / x1])  # left side, x1 < 0 here


def line_distance(pos, m: float, c: float) -> float:
    """Perpendicular distance from ``pos`` to the line x2 = m*x1 + c."""
    x1, x2 = float(pos[0]), float(pos[1])
    return abs(x2 - m * x1 - c) / math.sqrt(1.0 + m * m)


def circle_distance(pos, r0: float) -> float:
    """Distance from ``pos`` to the circle of radius ``r0`` (closed form)."""
    return abs(math.hypot(float(pos[0]), float(pos[1])) - r0)


def square_distance(pos, a: float) -> float:
    """Exact distance from ``pos`` to the boundary of the square ``max(|x1|,|x2|) = a``.

    Nearest-point distance, not the distance to the radial target: inside the
    square it is the gap to the nearest side, outside it may be to a corner.
    """
    u = abs(float(pos[0]))
    v = abs(float(pos[1]))
    if u < v:
        u, v = v, u  # fold into the u >= v octant
    if u <= a:
        return a - u
    if v <= a:
        return u - a
    return math.hypot(u - a, v - a)


def ellipse_distance(pos, a: float, b: float, tol: float = ELLIPSE_DISTANCE_TOL) -> float:
    """Distance from ``pos`` to the ellipse ``(a*cos t, b*sin t)``.

    The nearest boundary point lies in the same closed quadrant as ``pos``,
    where the squared distance is unimodal in the arc angle, so a
    golden-section search shrinks ``t`` in [0, pi/2] (after folding ``pos``
    into the first quadrant) down to a bracket of width ``tol``.  Fully
    deterministic: same inputs, same float operations, same result.
    """
    px = abs(float(pos[0]))
    py = abs(float(pos[1]))

    def f(t: float) -> float:
        dx = a * math.cos(t) - px
        dy = b * math.sin(t) - py
        return dx * dx + dy * dy

    lo, hi = 0.0, math.pi / 2.0
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
    return math.sqrt(f(0.5 * (lo + hi)))


@dataclass(frozen=True)
class Line:
    """The line x2 = m*x1 + c."""

    m: float
    c: float

    def __post_init__(self):
        for name in ("m", "c"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ConfigError(f"line {name} must be finite, got {getattr(self, name)}")
            object.__setattr__(self, name, v)

    def target(self, pos, fallback_dir=None) -> Vec2:
        return line_target(pos, self.m, self.c)

    def distance(self, pos) -> float:
        return line_distance(pos, self.m, self.c)


@dataclass(frozen=True)
class Ellipse:
    """Axis-aligned ellipse with semi-axes a (x1) and b (x2)."""

    a: float
    b: float

    def __post_init__(self):
        for name in ("a", "b"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v <= 0.0:
                raise ConfigError(
                    f"ellipse {name} must be > 0, got {getattr(self, name)}"
                )
            object.__setattr__(self, name, v)

    def target(self, pos, fallback_dir=None) -> Vec2:
        return ellipse_target(pos, self.a, self.b, fallback_dir)

    def distance(self, pos) -> float:
        return ellipse_distance(pos, self.a, self.b)


@dataclass(frozen=True)
class Circle:
    """Circle of radius r0 about the shape centre."""

    r0: float

    def __post_init__(self):
        v = float(self.r0)
        if not math.isfinite(v) or v <= 0.0:
            raise ConfigError(f"circle r0 must be > 0, got {self.r0}")
        object.__setattr__(self, "r0", v)

    def target(self, pos, fallback_dir=None) -> Vec2:
        return circle_target(pos, self.r0, fallback_dir)

    def distance(self, pos) -> float:
        return circle_distance(pos, self.r0)


@dataclass(frozen=True)
class Square:
    """Axis-aligned square with half side length a."""

    a: float

    def __post_init__(self):
        v = float(self.a)
        if not math.isfinite(v) or v <= 0.0:
            raise ConfigError(f"square a must be > 0, got {self.a}")
        object.__setattr__(self, "a", v)

    def target(self, pos, fallback_dir=None) -> Vec2:
        return square_target(pos, self.a, fallback_dir)

    def distance(self, pos) -> float:
        return square_distance(pos, self.a)


Shape = Union[Line, Ellipse, Circle, Square]

# Integer shape codes shared with the batch kernels (pure and compiled).
CODE_LINE = 0
CODE_ELLIPSE = 1
CODE_CIRCLE = 2
CODE_SQUARE = 3


def shape_code(shape: Shape) -> tuple[int, float, float]:
    """Encode a shape as ``(code, s0, s1)`` for the batch kernels."""
    if isinstance(shape, Line):
        return CODE_LINE, shape.m, shape.c
    if isinstance(shape, Ellipse):
        return CODE_ELLIPSE, shape.a, shape.b
    if isinstance(shape, Circle):
        return CODE_CIRCLE, shape.r0, 0.0
    if isinstance(shape, Square):
        return CODE_SQUARE, shape.a, 0.0
    raise ConfigError(f"unknown shape: {shape!r}")


def distance_to_shape(pos, shape: Shape) -> float:
    """Exact distance from ``pos`` to ``shape`` (dispatching helper)."""
    return shape.distance(pos)

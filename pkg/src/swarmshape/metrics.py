"""Observables: formation accuracy, spacing uniformity, tracking quality.

All functions are pure and operate on a single state; the integrator records
them per snapshot.  ``spacing_cv`` is the coefficient of variation of
nearest-neighbour distances (population standard deviation over mean): zero
for perfectly even spacing, larger as agents bunch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import nearest_neighbors
from .shapes import Shape, distance_to_shape
from .state import SwarmState

__all__ = [
    "StepMetrics",
    "shape_error",
    "max_shape_error",
    "spacing_cv",
    "tracking_error",
    "centroid_offset",
]


@dataclass(frozen=True)
class StepMetrics:
    """Per-snapshot metric row; tracking fields are None for static centres."""

    shape_error: float
    max_shape_error: float
    spacing_cv: float
    max_speed: float
    tracking_error: float | None = None
    centroid_offset: float | None = None


def _positions(state) -> np.ndarray:
    if isinstance(state, SwarmState):
        return state.positions
    return np.asarray(state, dtype=np.float64)


def shape_error(state, shape: Shape) -> float:
    """Mean distance from the agents to the shape."""
    pos = _positions(state)
    return float(np.mean([distance_to_shape(p, shape) for p in pos]))


def max_shape_error(state, shape: Shape) -> float:
    """Largest distance from any agent to the shape."""
    pos = _positions(state)
    return float(np.max([distance_to_shape(p, shape) for p in pos]))


def spacing_cv(state) -> float:
    """Coefficient of variation of nearest-neighbour distances.

    Needs at least two agents; with exactly two the distances are mutual and
    equal, so the value is 0.
    """
    pos = _positions(state)
    if pos.shape[0] < 2:
        raise ValueError("spacing_cv needs at least two agents")
    nn = nearest_neighbors(pos)
    d = np.sqrt(((pos - pos[nn]) ** 2).sum(axis=1))
    mean = d.mean()
    if mean == 0.0:
        return 0.0
    return float(d.std() / mean)


def tracking_error(state, center, r0: float) -> float:
    """Mean absolute deviation of agent radii from ``r0`` about ``center``.

    ``center`` is the instantaneous centre position (a 2-vector), not a
    trajectory; evaluate the trajectory at the state's time first.
    """
    pos = _positions(state)
    c = np.asarray(center, dtype=np.float64)
    radii = np.sqrt(((pos - c) ** 2).sum(axis=1))
    return float(np.abs(radii - r0).mean())


def centroid_offset(state, center) -> float:
    """Distance between the swarm centroid and the centre position."""
    pos = _positions(state)
    c = np.asarray(center, dtype=np.float64)
    delta = pos.mean(axis=0) - c
    return float(np.sqrt((delta**2).sum()))

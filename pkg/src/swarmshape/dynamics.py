"""Per-agent velocity terms and the combined steering field.

The field has three parts: a saturating pairwise attraction between agents,
the same profile pulling each agent toward its shape target, and a constant
magnitude repulsion away from the nearest neighbour, which spreads agents
along the shape instead of letting them bunch.  All terms are evaluated on
the same pre-step state (synchronous update); nothing here mutates a state.

The functions in this module are the scalar reference implementation.  The
integrator calls the batch kernels in ``_pure``/``_kernel`` instead, and the
test suite checks those kernels against this module term by term.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .shapes import initial_direction
from .state import DynamicsParams, SwarmState, Vec2

__all__ = [
    "COINCIDENCE_EPS",
    "foraging_term",
    "nearest_neighbor",
    "nearest_neighbors",
    "repulsion_term",
    "shape_velocity",
    "baseline_velocity",
    "velocity_field",
]

#: Below this separation a nearest-neighbour pair counts as coincident and
#: contributes zero repulsion (the direction is meaningless).
COINCIDENCE_EPS = 1e-9

#: Contract for target callables: ``target_of(pos, fallback_dir)`` returns the
#: shape point for ``pos``, using ``fallback_dir`` only when the projection
#: ray is degenerate.  ``Shape.target`` and tracking wrappers both fit.
TargetFn = Callable[..., Vec2]


def foraging_term(xi, xj, k: float, sigma: float, beta: float) -> Vec2:
    """Attraction ``k * (xj - xi) / (sigma^2 + |xj - xi|^2)**beta``.

    Antisymmetric under swapping ``xi`` and ``xj``; magnitude peaks at
    separation ``sigma / sqrt(2*beta - 1)`` and decays to zero beyond it.
    """
    dx = float(xj[0]) - float(xi[0])
    dy = float(xj[1]) - float(xi[1])
    denom = (sigma * sigma + dx * dx + dy * dy) ** beta
    return np.array([k * dx / denom, k * dy / denom])


def _positions(state) -> np.ndarray:
    if isinstance(state, SwarmState):
        return state.positions
    return np.asarray(state, dtype=np.float64)


def nearest_neighbor(i: int, state) -> int:
    """Index of the agent closest to agent ``i``.

    Exhaustive scan; equidistant ties go to the smallest index.  Raises
    ``ValueError`` for a single-agent swarm, which has no neighbour (the
    caller must then drop the repulsion term).
    """
    pos = _positions(state)
    m = pos.shape[0]
    if m < 2:
        raise ValueError("nearest_neighbor needs at least two agents")
    d2 = ((pos - pos[i]) ** 2).sum(axis=1)
    d2[i] = np.inf
    return int(np.argmin(d2))


def nearest_neighbors(positions) -> np.ndarray:
    """Nearest-neighbour index for every agent at once (same tie rule)."""
    pos = _positions(positions)
    m = pos.shape[0]
    if m < 2:
        raise ValueError("nearest_neighbors needs at least two agents")
    diff = pos[:, None, :] - pos[None, :, :]
    d2 = (diff**2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    return d2.argmin(axis=1)


def repulsion_term(xi, xn, r: float) -> Vec2:
    """Unit vector away from the nearest neighbour, scaled by ``r``.

    Returns the zero vector when ``|xi - xn| < COINCIDENCE_EPS``: the
    direction is then meaningless.  Run drivers count such coincidences in
    their diagnostics.
    """
    dx = float(xi[0]) - float(xn[0])
    dy = float(xi[1]) - float(xn[1])
    d = np.sqrt(dx * dx + dy * dy)
    if d < COINCIDENCE_EPS:
        return np.zeros(2)
    return np.array([r * dx / d, r * dy / d])


def _agent_velocity(
    pos: np.ndarray,
    i: int,
    params: DynamicsParams,
    target_of: TargetFn,
    fallback_dir,
) -> tuple[Vec2, bool]:
    """Velocity of agent ``i`` plus a coincident-neighbour flag."""
    m = pos.shape[0]
    xi = pos[i]
    v = np.zeros(2)
    for j in range(m):
        if j != i:
            v += foraging_term(xi, pos[j], params.k1, params.sigma, params.beta)
    target = target_of(xi, fallback_dir)
    v += foraging_term(xi, target, params.k2, params.sigma, params.beta)
    coincident = False
    if m >= 2 and params.r > 0.0:
        xn = pos[nearest_neighbor(i, pos)]
        d = np.sqrt((xi[0] - xn[0]) ** 2 + (xi[1] - xn[1]) ** 2)
        if d < COINCIDENCE_EPS:
            coincident = True
        else:
            v += repulsion_term(xi, xn, params.r)
    return v, coincident


def shape_velocity(
    i: int, state: SwarmState, params: DynamicsParams, target_of: TargetFn
) -> Vec2:
    """Full steering velocity of agent ``i`` for the current state.

    ``target_of`` follows the two-argument contract described on
    ``TargetFn``; the degenerate-ray fallback passed here is the agent's
    id-based initial direction, matching what a fresh run would use.
    """
    v, _ = _agent_velocity(
        state.positions, i, params, target_of, initial_direction(i, state.count)
    )
    return v


def baseline_velocity(
    i: int,
    state: SwarmState,
    goal,
    k: float,
    sigma: float,
    beta: float,
) -> Vec2:
    """Plain social-foraging velocity toward a fixed goal point.

    No shape target and no repulsion: pairwise attraction with gain ``k``
    plus the same profile pulling toward ``goal``.  Kept as the reference
    the shape-forming field is measured against.
    """
    pos = state.positions
    xi = pos[i]
    v = np.zeros(2)
    for j in range(state.count):
        if j != i:
            v += foraging_term(xi, pos[j], k, sigma, beta)
    v += foraging_term(xi, goal, k, sigma, beta)
    return v


def velocity_field(
    state: SwarmState,
    params: DynamicsParams,
    target_of: TargetFn,
    dirs: np.ndarray | None = None,
) -> tuple[np.ndarray, int]:
    """Velocities of all agents plus the number of coincident-pair events.

    Scalar reference implementation (O(M^2) Python loop).  ``dirs`` optionally
    supplies per-agent degenerate-ray fallbacks; by default each agent uses
    its id-based initial direction.
    """
    pos = state.positions
    m = state.count
    out = np.empty_like(pos)
    events = 0
    for i in range(m):
        fb = dirs[i] if dirs is not None else initial_direction(i, m)
        out[i], coincident = _agent_velocity(pos, i, params, target_of, fb)
        if coincident:
            events += 1
    return out, events

"""Deterministic planar swarm simulation: shape formation and
moving-target encircling.

Agents steer by a saturating pairwise attraction, an identical attraction
toward a per-agent shape target (line, ellipse, circle or square, optionally
recentred on a moving point), and a constant-magnitude repulsion from the
nearest neighbour.  Synchronous explicit integration, seeded initial
scatters and per-backend bit-reproducible runs make every experiment exactly
repeatable.

The hot kernels live in a compiled extension when it is built; a numpy
fallback with identical semantics is selected automatically otherwise (see
:mod:`swarmshape.backend`).
"""

from .backend import active_name, get_backend, has_compiled
from .dynamics import (
    COINCIDENCE_EPS,
    baseline_velocity,
    foraging_term,
    nearest_neighbor,
    nearest_neighbors,
    repulsion_term,
    shape_velocity,
    velocity_field,
)
from .integrator import (
    TERMINAL_CONVERGED,
    TERMINAL_DIVERGED,
    TERMINAL_MAX_STEPS,
    Convergence,
    DivergedError,
    IntegratorConfig,
    TrajectoryRecord,
    auto_stride,
    converged,
    run,
    step,
)
from .metrics import (
    StepMetrics,
    centroid_offset,
    max_shape_error,
    shape_error,
    spacing_cv,
    tracking_error,
)
from .scenario import (
    SCHEMA_VERSION,
    OutputSpec,
    Scenario,
    apply_override,
    export_metrics,
    export_trajectory,
    load_scenario,
    parse_scenario,
    run_scenario,
    serialize_scenario,
)
from .shapes import (
    Circle,
    Ellipse,
    Line,
    Shape,
    Square,
    circle_distance,
    circle_target,
    distance_to_shape,
    ellipse_distance,
    ellipse_target,
    initial_direction,
    line_distance,
    line_target,
    square_distance,
    square_target,
)
from .state import (
    AgentState,
    ConfigError,
    DynamicsParams,
    InitSpec,
    SwarmState,
    Vec2,
    init_swarm,
    vec2,
)
from .tracking import (
    CenterTrajectory,
    CircularCenter,
    LinearCenter,
    StaticCenter,
    center_at,
    tracking_target,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # backend
    "active_name",
    "get_backend",
    "has_compiled",
    # state
    "AgentState",
    "ConfigError",
    "DynamicsParams",
    "InitSpec",
    "SwarmState",
    "Vec2",
    "init_swarm",
    "vec2",
    # shapes
    "Circle",
    "Ellipse",
    "Line",
    "Shape",
    "Square",
    "circle_distance",
    "circle_target",
    "distance_to_shape",
    "ellipse_distance",
    "ellipse_target",
    "initial_direction",
    "line_distance",
    "line_target",
    "square_distance",
    "square_target",
    # dynamics
    "COINCIDENCE_EPS",
    "baseline_velocity",
    "foraging_term",
    "nearest_neighbor",
    "nearest_neighbors",
    "repulsion_term",
    "shape_velocity",
    "velocity_field",
    # tracking
    "CenterTrajectory",
    "CircularCenter",
    "LinearCenter",
    "StaticCenter",
    "center_at",
    "tracking_target",
    # metrics
    "StepMetrics",
    "centroid_offset",
    "max_shape_error",
    "shape_error",
    "spacing_cv",
    "tracking_error",
    # integrator
    "TERMINAL_CONVERGED",
    "TERMINAL_DIVERGED",
    "TERMINAL_MAX_STEPS",
    "Convergence",
    "DivergedError",
    "IntegratorConfig",
    "TrajectoryRecord",
    "auto_stride",
    "converged",
    "run",
    "step",
    # scenario / io
    "SCHEMA_VERSION",
    "OutputSpec",
    "Scenario",
    "apply_override",
    "export_metrics",
    "export_trajectory",
    "load_scenario",
    "parse_scenario",
    "run_scenario",
    "serialize_scenario",
]

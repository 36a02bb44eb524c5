import numpy as np
import pytest

from swarmshape import (
    Circle,
    DynamicsParams,
    Ellipse,
    InitSpec,
    Line,
    Square,
    SwarmState,
    init_swarm,
    run,
)
from swarmshape import _pure, dynamics, shapes
from swarmshape.backend import BACKEND_NAMES, active_name, get_backend, has_compiled
from swarmshape.integrator import IntegratorConfig, Convergence, _initial_dirs
from swarmshape.shapes import shape_code

SHAPES = [Line(-1.0, 5.0), Ellipse(4.0, 2.0), Circle(4.0), Square(5.0)]

needs_compiled = pytest.mark.skipif(not has_compiled(), reason="extension not built")


def call_field(impl, P, shape, params=None, center=(0.0, 0.0), dirs=None):
    params = params or DynamicsParams()
    code, s0, s1 = shape_code(shape)
    if dirs is None:
        dirs = _initial_dirs(P.shape[0])
    return impl.velocity_field(
        P, dirs, params.k1, params.k2, params.sigma, params.beta, params.r,
        code, s0, s1, float(center[0]), float(center[1]),
    )


def test_backend_names():
    assert BACKEND_NAMES == ("auto", "compiled", "python")


def test_default_resolution_matches_build():
    assert active_name() == ("compiled" if has_compiled() else "python")
    assert get_backend(None).NAME == active_name()
    assert get_backend("auto") is get_backend(None)


def test_python_backend_always_available():
    assert get_backend("python") is _pure
    assert _pure.NAME == "python"


def test_module_objects_pass_through():
    impl = get_backend("python")
    assert get_backend(impl) is impl


def test_unknown_backend_rejected():
    with pytest.raises(ValueError, match="unknown backend"):
        get_backend("fortran")


def test_compiled_resolution():
    if has_compiled():
        assert get_backend("compiled").NAME == "compiled"
    else:
        with pytest.raises(RuntimeError, match="not built"):
            get_backend("compiled")


def test_constants_agree_across_modules():
    assert _pure.GOLDEN_ITERS == 49
    if has_compiled():
        impl = get_backend("compiled")
        assert impl.GOLDEN_ITERS == _pure.GOLDEN_ITERS
        assert impl.COINCIDENCE_EPS == dynamics.COINCIDENCE_EPS
        assert impl.ELLIPSE_TOL == shapes.ELLIPSE_DISTANCE_TOL


@needs_compiled
@pytest.mark.parametrize("shape", SHAPES, ids=lambda s: type(s).__name__)
def test_velocity_parity_between_backends(shape):
    rng = np.random.default_rng(99)
    pure = get_backend("python")
    comp = get_backend("compiled")
    for m in (1, 2, 7, 30):
        P = rng.uniform(-8.0, 8.0, (m, 2))
        vp, ep = call_field(pure, P, shape, center=(0.3, -0.8))
        vc, ec = call_field(comp, P, shape, center=(0.3, -0.8))
        assert ep == ec
        assert np.abs(vp - vc).max() <= 1e-12


@needs_compiled
@pytest.mark.parametrize("shape", SHAPES, ids=lambda s: type(s).__name__)
def test_target_and_distance_parity_between_backends(shape):
    rng = np.random.default_rng(7)
    pure = get_backend("python")
    comp = get_backend("compiled")
    code, s0, s1 = shape_code(shape)
    for m in (1, 6, 40):
        P = rng.uniform(-9.0, 9.0, (m, 2))
        dirs = _initial_dirs(m)
        tp = pure.shape_targets(P, dirs, code, s0, s1, 0.0, 0.0)
        tc = comp.shape_targets(P, dirs, code, s0, s1, 0.0, 0.0)
        assert np.abs(tp - tc).max() <= 1e-12
        dp = pure.shape_distances(P, code, s0, s1, 0.0, 0.0)
        dc = comp.shape_distances(P, code, s0, s1, 0.0, 0.0)
        assert np.abs(dp - dc).max() <= 1e-12


@pytest.mark.parametrize("shape", SHAPES, ids=lambda s: type(s).__name__)
def test_batch_matches_scalar_reference(backend, shape):
    rng = np.random.default_rng(5)
    P = rng.uniform(-6.0, 6.0, (9, 2))
    state = SwarmState(P)
    v_ref, e_ref = dynamics.velocity_field(state, DynamicsParams(), shape.target)
    v, e = call_field(backend, P, shape)
    assert e == e_ref
    assert np.abs(v - v_ref).max() <= 1e-12


def test_backend_calls_are_bitwise_repeatable(backend):
    rng = np.random.default_rng(11)
    P = rng.uniform(-6.0, 6.0, (15, 2))
    code, s0, s1 = shape_code(Ellipse(4.0, 2.0))
    dirs = _initial_dirs(15)
    first, e1 = backend.velocity_field(
        P, dirs, 0.1, 2.0, 3.5, 1.2, 0.1, code, s0, s1, 0.0, 0.0
    )
    second, e2 = backend.velocity_field(
        P, dirs, 0.1, 2.0, 3.5, 1.2, 0.1, code, s0, s1, 0.0, 0.0
    )
    assert e1 == e2
    assert np.array_equal(first, second)
    assert np.array_equal(
        backend.shape_distances(P, code, s0, s1, 0.0, 0.0),
        backend.shape_distances(P, code, s0, s1, 0.0, 0.0),
    )


def test_full_run_is_bitwise_repeatable_per_backend(backend):
    init = init_swarm(InitSpec(count=10, seed=21))
    cfg = IntegratorConfig(
        max_steps=80, convergence=Convergence(vel_tol=0.0, shape_tol=0.0)
    )
    a = run(init, DynamicsParams(), Square(5.0), cfg, backend=backend)
    b = run(init, DynamicsParams(), Square(5.0), cfg, backend=backend)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.metrics, b.metrics)


def test_coincident_pair_events(backend):
    P = np.array([[1.0, 1.0], [1.0, 1.0]])
    _, events = call_field(backend, P, Circle(4.0))
    assert events == 2
    _, events = call_field(backend, P, Circle(4.0), params=DynamicsParams(r=0.0))
    assert events == 0


def test_single_agent_skips_repulsion(backend):
    P = np.array([[1.0, 2.0]])
    v, events = call_field(backend, P, Circle(4.0))
    assert events == 0
    target = Circle(4.0).target(P[0])
    expect = dynamics.foraging_term(P[0], target, 2.0, 3.5, 1.2)
    assert np.abs(v[0] - expect).max() <= 1e-15


def test_read_only_position_arrays_accepted(backend):
    state = init_swarm(InitSpec(count=6, seed=2))
    assert not state.positions.flags.writeable
    code, s0, s1 = shape_code(Circle(4.0))
    v, _ = call_field(backend, state.positions, Circle(4.0))
    assert np.isfinite(v).all()
    d = backend.shape_distances(state.positions, code, s0, s1, 0.0, 0.0)
    assert np.isfinite(d).all()


def test_degenerate_rows_use_fallback_dirs(backend):
    P = np.zeros((1, 2))
    code, s0, s1 = shape_code(Circle(4.0))
    t = backend.shape_targets(P, np.array([[1.0, 0.0]]), code, s0, s1, 0.0, 0.0)
    assert t.tolist() == [[4.0, 0.0]]
    t = backend.shape_targets(P, np.array([[0.0, 1.0]]), code, s0, s1, 0.0, 0.0)
    assert np.abs(t - [0.0, 4.0]).max() <= 1e-12

import math

import numpy as np
import pytest

from swarmshape import (
    Circle,
    CircularCenter,
    ConfigError,
    DynamicsParams,
    IntegratorConfig,
    InitSpec,
    LinearCenter,
    StaticCenter,
    center_at,
    circle_target,
    init_swarm,
    run,
    tracking_target,
)

RNG = np.random.default_rng(7)


def test_static_center_defaults_to_origin():
    c = StaticCenter()
    assert c.at(0.0).tolist() == [0.0, 0.0]
    assert c.at(123.0).tolist() == [0.0, 0.0]
    assert StaticCenter(position=(2.0, -1.0)).at(50.0).tolist() == [2.0, -1.0]


def test_linear_center_path():
    c = LinearCenter(start=(-10.0, -10.0), velocity=(0.1, 0.1))
    assert c.at(0.0).tolist() == [-10.0, -10.0]
    end = c.at(200.0)
    assert abs(end[0] - 10.0) < 1e-9 and abs(end[1] - 10.0) < 1e-9


def test_circular_center_path():
    c = CircularCenter(radius=6.0, period=200)
    assert c.at(0.0).tolist() == [6.0, 0.0]
    quarter = c.at(50.0)
    assert abs(quarter[0]) < 1e-12 and abs(quarter[1] - 6.0) < 1e-12
    half = c.at(100.0)
    assert abs(half[0] + 6.0) < 1e-12 and abs(half[1]) < 1e-12


def test_circular_center_periodic():
    c = CircularCenter(radius=6.0, period=200)
    for t in (0.0, 17.0, 50.0, 123.456):
        assert np.abs(c.at(t + 200.0) - c.at(t)).max() < 1e-9


@pytest.mark.parametrize(
    "ctor",
    [
        lambda: CircularCenter(radius=0.0, period=200),
        lambda: CircularCenter(radius=6.0, period=0),
        lambda: CircularCenter(radius=6.0, period=2.5),
        lambda: CircularCenter(radius=6.0, period=True),
        lambda: LinearCenter(start=(np.nan, 0.0), velocity=(0.1, 0.1)),
        lambda: LinearCenter(start=(0.0, 0.0), velocity="fast"),
        lambda: StaticCenter(position=(np.inf, 0.0)),
    ],
)
def test_center_validation(ctor):
    with pytest.raises(ConfigError):
        ctor()


def test_center_at_rejects_negative_time():
    c = StaticCenter()
    with pytest.raises(ValueError):
        center_at(c, -1.0)
    with pytest.raises(ValueError):
        center_at(c, np.nan)
    assert center_at(c, 5.0).tolist() == [0.0, 0.0]


def test_tracking_target_reduces_to_circle_at_origin():
    for _ in range(100):
        p = RNG.uniform(-10, 10, 2)
        assert np.array_equal(
            tracking_target(p, (0.0, 0.0), 2.0), circle_target(p, 2.0)
        )


def test_tracking_target_known_point():
    t = tracking_target((13.0, 4.0), (10.0, 0.0), 2.0)
    assert abs(t[0] - 11.2) < 1e-12 and abs(t[1] - 1.6) < 1e-12


def test_tracking_target_ring_radius():
    for _ in range(200):
        c = RNG.uniform(-20, 20, 2)
        p = RNG.uniform(-20, 20, 2)
        if np.hypot(*(p - c)) < 1e-6:
            continue
        t = tracking_target(p, c, 3.0)
        assert abs(np.hypot(*(t - c)) - 3.0) < 1e-12


def test_tracking_target_translation_shift():
    for _ in range(100):
        c = RNG.uniform(-5, 5, 2)
        p = RNG.uniform(-5, 5, 2)
        u = RNG.uniform(-30, 30, 2)
        a = tracking_target(p, c, 2.0) + u
        b = tracking_target(p + u, c + u, 2.0)
        assert np.abs(a - b).max() < 1e-9


def test_tracking_target_degenerate_uses_fallback():
    t = tracking_target((3.0, 3.0), (3.0, 3.0), 2.0, fallback_dir=(0.0, -1.0))
    assert abs(t[0] - 3.0) < 1e-12 and abs(t[1] - 1.0) < 1e-12


def test_static_center_run_matches_plain_circle_run():
    # an explicit origin-centred static run must be bit-identical to the
    # centreless one, including the absence of tracking metric columns
    init = init_swarm(InitSpec(count=6, seed=2))
    cfg = IntegratorConfig(max_steps=50)
    plain = run(init, DynamicsParams(), Circle(4.0), cfg)
    centred = run(init, DynamicsParams(), Circle(4.0), cfg, center=StaticCenter())
    assert plain.metric_names == centred.metric_names
    assert np.array_equal(plain.positions, centred.positions)
    assert np.array_equal(plain.metrics, centred.metrics)

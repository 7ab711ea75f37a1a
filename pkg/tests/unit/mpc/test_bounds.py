import numpy as np

from stride.centroidal import ContactSchedule
from stride.mpc import FootBounds, foot_bounds, relax_bounds
from stride.terrain import Terrain

import pytest


P_C = np.array([1.0, 0.0, 0.38])


@pytest.fixture
def gap_terrain():
    return Terrain.from_dict({"patches": [
        {"x_start": -10.0, "x_end": 1.0},
        {"x_start": 1.1, "x_end": 10.0},
    ]})


def test_reach_box_without_terrain(schedule):
    bounds = foot_bounds(None, P_C, schedule, 0)
    assert np.allclose(bounds.lower, [0.65, -0.25, -0.15])
    assert np.allclose(bounds.upper, [1.35, 0.25, 0.15])
    assert bounds.height is None
    assert not bounds.violated


def test_hip_offset(schedule):
    bounds = foot_bounds(None, P_C, schedule, 0, hip_offset=[0.0, 0.1, -0.02], nominal=0.36, reach_x=0.3)
    assert np.allclose(bounds.lower, [0.7, -0.15, -0.15])
    assert np.allclose(bounds.upper, [1.3, 0.35, 0.15])


@pytest.mark.parametrize("target_x, lo, hi", [
    (0.9, 0.67, 0.98),
    (1.07, 1.12, 1.33),
    (1.2, 1.12, 1.33),
])
def test_gap_selects_closest_interval(gap_terrain, schedule, target_x, lo, hi):
    bounds = foot_bounds(gap_terrain, P_C, schedule, 0, target=[target_x, 0.0, 0.0], margin=0.02)
    assert bounds.lower[0] == pytest.approx(lo)
    assert bounds.upper[0] == pytest.approx(hi)
    assert bounds.height == 0.0
    assert bounds.contains([0.5 * (lo + hi), 0.0, 0.0])
    assert not bounds.contains([1.05, 0.0, 0.0])


def test_unreachable_terrain(schedule):
    terrain = Terrain.from_dict({"patches": [{"x_start": -10.0, "x_end": 10.0, "height": 0.5}]})
    bounds = foot_bounds(terrain, P_C, schedule, 0)
    assert bounds.violated
    assert bounds.height is None


def test_standing_schedule_has_no_preview(gap_terrain):
    schedule = ContactSchedule.standing_schedule(h=10)
    bounds = foot_bounds(gap_terrain, P_C, schedule, 0, target=[1.05, 0.0, 0.0])
    assert bounds.lower[0] == pytest.approx(0.65)
    assert bounds.height is None


def test_relax(gap_terrain, schedule):
    bounds = foot_bounds(gap_terrain, P_C, schedule, 0, target=[1.2, 0.0, 0.0])
    relaxed = relax_bounds(bounds)
    assert relaxed.lower[0] == pytest.approx(0.65)
    assert relaxed.upper[0] == pytest.approx(1.35)
    assert relaxed.height == bounds.height


@pytest.mark.parametrize("position, margin", [
    ([0.5, 0.0, 0.0], 0.5),
    ([0.9, 0.0, 0.0], 0.1),
    ([1.2, 0.0, 0.0], -0.2),
])
def test_margin(position, margin):
    bounds = FootBounds([0.0, -1.0, -1.0], [1.0, 1.0, 1.0])
    assert bounds.margin(position) == pytest.approx(margin)

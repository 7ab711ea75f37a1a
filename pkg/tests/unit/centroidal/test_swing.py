import numpy as np

from stride.centroidal import SwingTrajectory, swing_trajectory, clearance_apex

import pytest


START = np.array([0.0, 0.08, 0.0])
TARGET = np.array([0.2, 0.08, 0.05])


def test_endpoints():
    curve = SwingTrajectory(START, TARGET, apex=0.06)
    position, velocity = curve.evaluate(0.0)
    assert np.allclose(position, START)
    assert np.allclose(velocity, 0.0)
    position, velocity = curve.evaluate(1.0)
    assert np.allclose(position, TARGET)
    assert np.allclose(velocity, 0.0)


def test_apex():
    curve = SwingTrajectory(START, TARGET, apex=0.06)
    position = curve.position(0.5)
    assert np.isclose(position[0], 0.1)
    assert np.isclose(position[2], 0.025 + 0.06)


def test_clipped_phase():
    curve = SwingTrajectory(START, TARGET)
    assert np.allclose(curve.position(1.5), TARGET)
    assert np.allclose(curve.position(-0.5), START)


def test_velocity_is_derivative():
    curve = SwingTrajectory(START, TARGET, apex=0.06)
    eps = 1e-6
    for s in (0.2, 0.5, 0.7):
        numerical = (curve.position(s + eps) - curve.position(s - eps)) / (2 * eps)
        assert np.allclose(curve.evaluate(s)[1], numerical, atol=1e-6)


@pytest.mark.parametrize("s_now", [0.1, 0.4, 0.8])
def test_retarget_continuity(s_now):
    curve = SwingTrajectory(START, TARGET, apex=0.06)
    new_target = TARGET + np.array([0.05, 0.0, -0.02])
    refit = curve.retarget(new_target, s_now)
    assert np.allclose(refit.position(s_now), curve.position(s_now))
    assert np.allclose(refit.position(1.0), new_target)


def test_retarget_after_touchdown():
    curve = SwingTrajectory(START, TARGET)
    refit = curve.retarget(TARGET, 1.0)
    assert np.allclose(refit.position(0.3)[0:2], TARGET[0:2])
    assert np.allclose(refit.position(1.0), TARGET)


def test_invalid_s0():
    with pytest.raises(ValueError):
        SwingTrajectory(START, TARGET, s0=1.0)


def test_swing_trajectory_phase():
    with pytest.raises(ValueError):
        swing_trajectory(START, TARGET, 1.5)
    position, _ = swing_trajectory(START, TARGET, 1.0)
    assert np.allclose(position, TARGET)


@pytest.mark.parametrize("apex, liftoff, target, result", [
    (0.06, 0.0, 0.0, 0.06),
    (0.06, 0.0, 0.1, 0.13),
    (0.06, 0.1, 0.0, 0.06),
    (0.2, 0.0, 0.1, 0.2),
])
def test_clearance_apex(apex, liftoff, target, result):
    assert np.isclose(clearance_apex(apex, liftoff, target), result)

import numpy as np

from stride.errors import OutOfReachError
from stride.profiler import Profiler
from stride.utils import (
    skew, rot_x, rot_y, rot_z, rotation_zyx, rotation_axis_angle,
    clamp_unit, make_rng, numerical_jacobian, as_vector, cross3,
)

import pytest


@pytest.mark.parametrize("a, b", [
    ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
    ([0.3, -1.2, 2.0], [4.0, 0.5, -0.7]),
    ([0.0, 0.0, 0.0], [1.0, 2.0, 3.0]),
])
def test_skew_cross(a, b):
    a, b = np.array(a), np.array(b)
    assert np.allclose(skew(a) @ b, np.cross(a, b))
    assert np.allclose(cross3(a, b), np.cross(a, b))


@pytest.mark.parametrize("rot", [rot_x, rot_y, rot_z])
@pytest.mark.parametrize("angle", [0.0, 0.3, -1.2, np.pi])
def test_rotations_orthonormal(rot, angle):
    r = rot(angle)
    assert np.allclose(r @ r.T, np.eye(3))
    assert np.isclose(np.linalg.det(r), 1.0)


def test_rotation_zyx_order():
    roll, pitch, yaw = 0.1, -0.2, 0.3
    assert np.allclose(rotation_zyx(roll, pitch, yaw), rot_z(yaw) @ rot_y(pitch) @ rot_x(roll))


@pytest.mark.parametrize("axis, rot", [
    ([1.0, 0.0, 0.0], rot_x),
    ([0.0, 1.0, 0.0], rot_y),
    ([0.0, 0.0, 1.0], rot_z),
])
def test_rotation_axis_angle(axis, rot):
    assert np.allclose(rotation_axis_angle(np.array(axis), 0.7), rot(0.7))


@pytest.mark.parametrize("value, result", [
    (0.5, 0.5),
    (1.0 + 1e-12, 1.0),
    (-1.0 - 1e-12, -1.0),
])
def test_clamp_unit(value, result):
    assert clamp_unit(value, "c") == result


@pytest.mark.parametrize("value", [1.01, -2.0, float('nan')])
def test_clamp_unit_error(value):
    with pytest.raises(OutOfReachError) as exc_info:
        clamp_unit(value, "cos_knee")
    assert exc_info.value.quantity == "cos_knee"


def test_make_rng_reproducible():
    a = make_rng(3, "collect", 2).normal(size=5)
    b = make_rng(3, "collect", 2).normal(size=5)
    c = make_rng(3, "collect", 3).normal(size=5)
    d = make_rng(4, "collect", 2).normal(size=5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_numerical_jacobian():
    fun = lambda x: np.array([x[0] ** 2, x[0] * x[1], np.sin(x[1])])
    x = np.array([0.7, -0.4])
    expected = np.array([[2 * x[0], 0.0], [x[1], x[0]], [0.0, np.cos(x[1])]])
    assert np.allclose(numerical_jacobian(fun, x), expected, atol=1e-8)


@pytest.mark.parametrize("value, size, result", [
    (2.0, 3, [2.0, 2.0, 2.0]),
    ([1, 2], 2, [1.0, 2.0]),
])
def test_as_vector(value, size, result):
    assert np.array_equal(as_vector(value, size), result)


def test_as_vector_size_mismatch():
    with pytest.raises(ValueError):
        as_vector([1.0, 2.0], 3, name="L1_pc")


def test_profiler():
    profiler = Profiler()
    for _ in range(3):
        with profiler.timeit("qp"):
            pass
    assert profiler["qp"].count == 3
    assert profiler["qp"].average_time >= 0.0
    assert np.isnan(profiler["empty"].average_time)
    assert np.isnan(profiler["empty"].percentile(95))

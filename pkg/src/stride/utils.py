"""
Utilities
"""

import zlib

import numpy as np

from .errors import OutOfReachError

__all__ = [
    'skew',
    'rot_x',
    'rot_y',
    'rot_z',
    'rotation_zyx',
    'rotation_axis_angle',
    'clamp_unit',
    'make_rng',
    'numerical_jacobian',
    'as_vector',
    'cross3',
]


def skew(v):
    """Cross-product matrix: skew(a) @ b == cross(a, b)"""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def rot_x(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_zyx(roll, pitch, yaw):
    """Body rotation R = Rz(yaw) Ry(pitch) Rx(roll)"""
    return rot_z(yaw) @ rot_y(pitch) @ rot_x(roll)


def rotation_axis_angle(axis, angle):
    """Rodrigues formula for a unit axis"""
    k = skew(axis)
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def clamp_unit(value, name, tol=1e-9):
    """Clamps a arcsin/arccos argument into [-1, 1]; beyond ``tol`` it is an error"""
    if abs(value) > 1.0 + tol or not np.isfinite(value):
        raise OutOfReachError("{}={!r} outside [-1, 1]".format(name, value), quantity=name, value=value)
    return min(1.0, max(-1.0, value))


def _key_to_int(key):
    if isinstance(key, (int, np.integer)):
        return int(key)
    return zlib.crc32(str(key).encode("utf-8"))


def make_rng(seed, *keys):
    """Independent random stream derived from ``seed`` and a key path.

       The same (seed, keys) always yields the same stream; different key
       paths yield statistically independent streams.
    """
    seed_seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key_to_int(k) for k in keys))
    return np.random.default_rng(seed_seq)


def numerical_jacobian(fun, x, eps=1e-6):
    """Central finite-difference Jacobian of a vector function"""
    x = np.asarray(x, dtype=float)
    f0 = np.atleast_1d(fun(x))
    jac = np.zeros((f0.size, x.size))
    for i in range(x.size):
        dx = np.zeros_like(x)
        dx[i] = eps
        jac[:, i] = (np.atleast_1d(fun(x + dx)) - np.atleast_1d(fun(x - dx))) / (2.0 * eps)
    return jac


def as_vector(value, size, name="value"):
    """Broadcasts a scalar or list config value to a float vector of ``size``"""
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(size, float(arr))
    if arr.shape != (size,):
        raise ValueError("{}: expected {} values, got {}".format(name, size, arr.shape))
    return arr.copy()


def cross3(a, b):
    """Cross product of two 3-vectors (cheaper than numpy.cross on tiny arrays)"""
    return np.array([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])

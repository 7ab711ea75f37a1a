"""
Foot-location bounds with one-step terrain preview.

The kinematic reach box sits about the hip, found from the CoM:

    |x - x_hip| <= reach_x, |y - y_hip| <= reach_y,
    |z - (z_hip - nominal)| <= reach_z

Only terrain inside the reach box is previewed. The box is intersected
with the allowed interval of the patch closest to the current target.
"""

import logging

import numpy as np

from ..centroidal import LEGS

__all__ = [
    "FootBounds",
    "foot_bounds",
    "relax_bounds",
]

LOG = logging.getLogger(__name__)


class FootBounds(object):
    """Box on a foot location plus the height of the selected foothold.

       ``height`` is None when no terrain restriction applies.
    """

    def __init__(self, lower, upper, height=None, violated=False, reach=None):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.height = height
        self.violated = bool(violated)
        if reach is None:
            reach = (self.lower.copy(), self.upper.copy())
        self.reach = reach

    def contains(self, position, tol=0.0):
        position = np.asarray(position, dtype=float)
        return bool(np.all(position >= self.lower - tol) and np.all(position <= self.upper + tol))

    def margin(self, position):
        """Smallest signed distance to the box faces (negative outside)"""
        position = np.asarray(position, dtype=float)
        return float(min(np.min(position - self.lower), np.min(self.upper - position)))

    def __repr__(self):
        return "{}(lower={!r}, upper={!r}, height={!r}, violated={!r})".format(
            type(self).__name__, self.lower.tolist(), self.upper.tolist(), self.height, self.violated)


def foot_bounds(terrain, p_c, schedule, leg, target=None, hip_offset=None, nominal=0.38, reach_x=0.35,
                reach_y=0.25, reach_z=0.15, margin=0.0):
    """Bounds of the next foothold of ``leg``.

       Parameters
       ----------
       terrain: Terrain or None
       p_c: (3,) array
           current CoM position
       schedule: ContactSchedule
       leg: int
       target: (3,) array, optional
           current target of the foothold; selects among allowed intervals
       hip_offset: (3,) array, optional
           hip position relative to the CoM
       nominal: float
           nominal hip-to-foot height

       Returns
       -------
       FootBounds
    """
    p_c = np.asarray(p_c, dtype=float)
    hip = p_c if hip_offset is None else p_c + np.asarray(hip_offset, dtype=float)
    lower = np.array([hip[0] - reach_x, hip[1] - reach_y, hip[2] - nominal - reach_z])
    upper = np.array([hip[0] + reach_x, hip[1] + reach_y, hip[2] - nominal + reach_z])
    if terrain is None or schedule.next_window(leg) is None:
        return FootBounds(lower, upper)
    side = LEGS[leg]
    intervals = []
    for a, b, height in terrain.allowed_intervals(side, lower[0], upper[0]):
        lo, hi = a + margin, b - margin
        if hi >= lo and lower[2] <= height <= upper[2]:
            intervals.append((lo, hi, height))
    if not intervals:
        LOG.warning("no foothold for the %s foot within reach of x=%.3f", side, hip[0])
        return FootBounds(lower, upper, violated=True)
    x_target = hip[0] if target is None else float(target[0])

    def distance(interval):
        lo, hi, _ = interval
        return 0.0 if lo <= x_target <= hi else min(abs(x_target - lo), abs(x_target - hi))

    lo, hi, height = min(intervals, key=distance)
    reach = (lower.copy(), upper.copy())
    lower[0], upper[0] = lo, hi
    return FootBounds(lower, upper, height=height, reach=reach)


def relax_bounds(bounds):
    """The kinematic reach box of ``bounds``, for a retry of an infeasible solve"""
    return FootBounds(bounds.reach[0], bounds.reach[1], height=bounds.height, violated=bounds.violated)

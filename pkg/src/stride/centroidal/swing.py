"""
Swing-foot curves.

Horizontal motion follows the quintic blend 10u^3 - 15u^4 + 6u^5, the
vertical motion adds a sin^2 bump of height ``apex`` to the blended
liftoff/target heights, so both endpoints are reached with zero velocity.
Velocities are derivatives with respect to the swing phase s in [0, 1].
"""

import numpy as np

__all__ = [
    "SwingTrajectory",
    "swing_trajectory",
    "clearance_apex",
]

OBSTACLE_CLEARANCE = 0.03


def _blend(u):
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u))


def _blend_rate(u):
    return 30.0 * u * u * (1.0 - u) * (1.0 - u)


def clearance_apex(apex, liftoff_height, target_height, clearance=OBSTACLE_CLEARANCE):
    """Apex raised above a step-up so the foot clears the edge"""
    rise = target_height - liftoff_height
    if rise > 0.0:
        return max(apex, rise + clearance)
    return apex


class SwingTrajectory(object):
    """Swing curve from ``start`` (reached at phase ``s0``) to ``target`` at phase 1.

       A curve with ``s0 > 0`` is a re-fit started from a mid-swing point.
    """

    def __init__(self, start, target, apex=0.06, s0=0.0):
        if not 0.0 <= s0 < 1.0:
            raise ValueError("s0 {!r} outside [0, 1)".format(s0))
        self.start = np.array(start, dtype=float)
        self.target = np.array(target, dtype=float)
        self.apex = float(apex)
        self.s0 = float(s0)
        self._base = self.start.copy()
        self._base[-1] -= self._bump(self.s0)

    def _bump(self, s):
        return self.apex * np.sin(np.pi * s) ** 2

    def _bump_rate(self, s):
        return self.apex * np.pi * np.sin(2.0 * np.pi * s)

    def evaluate(self, s):
        """(position, d position / d s) at phase ``s`` (clipped into [s0, 1])"""
        s = min(1.0, max(self.s0, float(s)))
        span = 1.0 - self.s0
        u = (s - self.s0) / span
        blend = _blend(u)
        rate = _blend_rate(u) / span
        delta = self.target - self._base
        position = self._base + delta * blend
        velocity = delta * rate
        position[-1] += self._bump(s)
        velocity[-1] += self._bump_rate(s)
        return position, velocity

    def position(self, s):
        return self.evaluate(s)[0]

    def retarget(self, target, s_now):
        """New curve through the current point toward ``target``"""
        if s_now >= 1.0:
            return type(self)(target, target, self.apex, 0.0)
        return type(self)(self.position(s_now), target, self.apex, s0=max(s_now, self.s0))


def swing_trajectory(liftoff, target, phase, apex=0.06):
    """(pos, vel) of the swing curve from ``liftoff`` to ``target`` at ``phase``"""
    if not 0.0 <= phase <= 1.0:
        raise ValueError("phase {!r} outside [0, 1]".format(phase))
    return SwingTrajectory(liftoff, target, apex).evaluate(phase)

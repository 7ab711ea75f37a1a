"""
Periodic contact schedules.

Legs are indexed as in the robot model (0 = left, 1 = right). A walking
step lasts ``h_swing`` MPC columns; during a step one leg swings while
the other stands, and the swing leg alternates step by step.
``phase`` counts the columns of the current step already elapsed.
"""

import numpy as np

__all__ = [
    "ContactSchedule",
    "SwingWindow",
    "LEGS",
]

LEGS = ("left", "right")


class SwingWindow(object):
    """Columns [start, end) of one swing phase, relative to the current column.

       ``start`` is negative when the swing began before the current column;
       ``end`` is the touchdown column and may lie beyond the horizon.
    """

    def __init__(self, leg, start, end):
        self.leg = leg
        self.start = start
        self.end = end

    @property
    def length(self):
        return self.end - self.start

    def phase_at(self, k):
        return (k - self.start) / self.length

    def __contains__(self, k):
        return self.start <= k < self.end

    def __repr__(self):
        return "{}(leg={!r}, start={!r}, end={!r})".format(type(self).__name__, self.leg, self.start, self.end)


class ContactSchedule(object):
    def __init__(self, h=10, h_swing=5, swing_leg=0, phase=0, double_support=0, standing=False):
        if not 0 <= phase < h_swing:
            raise ValueError("phase {!r} outside [0, {})".format(phase, h_swing))
        if not 0 <= double_support < h_swing:
            raise ValueError("double_support {!r} outside [0, {})".format(double_support, h_swing))
        self.h = int(h)
        self.h_swing = int(h_swing)
        self.swing_leg = int(swing_leg)
        self.phase = int(phase)
        self.double_support = int(double_support)
        self.standing = bool(standing)
        self.sigma = self._make_sigma()

    @classmethod
    def walking(cls, h=10, h_swing=None, swing_leg=0, phase=0, double_support=0):
        if h_swing is None:
            h_swing = h // 2
        return cls(h=h, h_swing=h_swing, swing_leg=swing_leg, phase=phase, double_support=double_support)

    @classmethod
    def standing_schedule(cls, h=10, h_swing=None):
        if h_swing is None:
            h_swing = h // 2
        return cls(h=h, h_swing=h_swing, standing=True)

    def _step_of(self, k):
        """(step index, column inside the step) of horizon column k"""
        return divmod(k + self.phase, self.h_swing)

    def swing_leg_of_step(self, step):
        return self.swing_leg if step % 2 == 0 else 1 - self.swing_leg

    def _make_sigma(self):
        sigma = np.ones((len(LEGS), self.h), dtype=int)
        if self.standing:
            return sigma
        for k in range(self.h):
            step, column = self._step_of(k)
            if column >= self.double_support:
                sigma[self.swing_leg_of_step(step), k] = 0
        return sigma

    def stance(self, leg, k):
        return bool(self.sigma[leg, k])

    def stance_count(self, k):
        return int(self.sigma[:, k].sum())

    @property
    def steps_remaining(self):
        """Columns left in the current step"""
        return self.h_swing - self.phase

    @property
    def at_step_start(self):
        return self.phase == 0

    def current_swing_leg(self):
        if self.standing:
            return None
        return self.swing_leg

    def windows(self, leg=None, limit=None):
        """Swing windows intersecting columns [0, limit) (default the horizon)"""
        if self.standing:
            return []
        if limit is None:
            limit = self.h
        result = []
        step = 0
        while True:
            start = step * self.h_swing - self.phase + self.double_support
            if start >= limit:
                break
            end = (step + 1) * self.h_swing - self.phase
            swing = self.swing_leg_of_step(step)
            if leg is None or swing == leg:
                result.append(SwingWindow(swing, start, end))
            step += 1
        return result

    def next_window(self, leg):
        """First swing window of ``leg`` that has not touched down yet"""
        for window in self.windows(leg, limit=self.h + 2 * self.h_swing):
            if window.end > 0:
                return window
        return None

    def advance(self, columns=1):
        """Schedule shifted forward by ``columns``"""
        if self.standing:
            return self
        phase = self.phase + columns
        steps, phase = divmod(phase, self.h_swing)
        swing_leg = self.swing_leg if steps % 2 == 0 else 1 - self.swing_leg
        return type(self)(h=self.h, h_swing=self.h_swing, swing_leg=swing_leg, phase=phase,
                          double_support=self.double_support)

    def as_dict(self):
        return {"h": self.h, "h_swing": self.h_swing, "swing_leg": self.swing_leg, "phase": self.phase,
                "double_support": self.double_support, "standing": self.standing}

    def __repr__(self):
        return "{}({})".format(type(self).__name__, ", ".join(
            "{}={!r}".format(key, value) for key, value in self.as_dict().items()))

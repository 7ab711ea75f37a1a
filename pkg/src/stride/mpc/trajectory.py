"""
Decision-variable layout of one MPC step and the horizon trajectories.

Per step k the search direction stacks, for each leg i in (left, right),

    [df_i (3), dtau_i (3), dp_f,i (3)]

followed by dp_c (3): 21 entries for two legs.
"""

import numpy as np

from ..centroidal import ContactConfig

__all__ = [
    "N_LEGS",
    "STEP_SIZE",
    "force_index",
    "moment_index",
    "foot_index",
    "com_index",
    "SearchDirections",
    "ControlTrajectory",
    "foot_groups",
]

N_LEGS = 2
LEG_SIZE = 9
STEP_SIZE = N_LEGS * LEG_SIZE + 3


def force_index(leg):
    return slice(LEG_SIZE * leg, LEG_SIZE * leg + 3)


def moment_index(leg):
    return slice(LEG_SIZE * leg + 3, LEG_SIZE * leg + 6)


def foot_index(leg):
    return slice(LEG_SIZE * leg + 6, LEG_SIZE * leg + 9)


def com_index():
    return slice(N_LEGS * LEG_SIZE, STEP_SIZE)


class SearchDirections(object):
    """Search directions over the horizon.

       Attributes
       ----------
       forces, moments, feet: (h, 2, 3) arrays
       com: (h, 3) array
    """

    def __init__(self, forces, moments, feet, com):
        self.forces = np.asarray(forces, dtype=float)
        self.moments = np.asarray(moments, dtype=float)
        self.feet = np.asarray(feet, dtype=float)
        self.com = np.asarray(com, dtype=float)

    @property
    def h(self):
        return self.com.shape[0]

    @classmethod
    def zeros(cls, h):
        return cls(np.zeros((h, N_LEGS, 3)), np.zeros((h, N_LEGS, 3)), np.zeros((h, N_LEGS, 3)), np.zeros((h, 3)))

    @classmethod
    def from_steps(cls, steps):
        """From an (h, 21) array of per-step vectors"""
        steps = np.asarray(steps, dtype=float).reshape(-1, STEP_SIZE)
        forces = np.stack([steps[:, force_index(leg)] for leg in range(N_LEGS)], axis=1)
        moments = np.stack([steps[:, moment_index(leg)] for leg in range(N_LEGS)], axis=1)
        feet = np.stack([steps[:, foot_index(leg)] for leg in range(N_LEGS)], axis=1)
        return cls(forces, moments, feet, steps[:, com_index()])

    def as_steps(self):
        steps = np.zeros((self.h, STEP_SIZE))
        for leg in range(N_LEGS):
            steps[:, force_index(leg)] = self.forces[:, leg]
            steps[:, moment_index(leg)] = self.moments[:, leg]
            steps[:, foot_index(leg)] = self.feet[:, leg]
        steps[:, com_index()] = self.com
        return steps

    def norms(self):
        """(position, force, moment) infinity norms"""
        position = max(np.max(np.abs(self.feet)), np.max(np.abs(self.com)))
        return float(position), float(np.max(np.abs(self.forces))), float(np.max(np.abs(self.moments)))

    def scaled_norm(self, tolerances):
        """Largest norm relative to its tolerance; <= 1 means converged"""
        position, force, moment = self.norms()
        return max(position / tolerances.eta_pos, force / tolerances.eta_f, moment / tolerances.eta_tau)


class ControlTrajectory(object):
    """Total contact wrenches, foot locations and CoM positions over the horizon"""

    def __init__(self, forces, moments, feet, com):
        self.forces = np.array(forces, dtype=float)
        self.moments = np.array(moments, dtype=float)
        self.feet = np.array(feet, dtype=float)
        self.com = np.array(com, dtype=float)

    @property
    def h(self):
        return self.com.shape[0]

    def copy(self):
        return type(self)(self.forces, self.moments, self.feet, self.com)

    @classmethod
    def initial_guess(cls, bundle, mass, gravity=9.81):
        """Weight split over the stance feet, zero moments, reference feet and CoM"""
        schedule = bundle.schedule
        h = schedule.h
        forces = np.zeros((h, N_LEGS, 3))
        for k in range(h):
            count = schedule.stance_count(k)
            for leg in range(N_LEGS):
                if count and schedule.stance(leg, k):
                    forces[k, leg, 2] = mass * gravity / count
        return cls(forces, np.zeros((h, N_LEGS, 3)), bundle.p_f_ref, bundle.p_c_ref[:h])

    def apply(self, directions):
        return type(self)(self.forces + directions.forces, self.moments + directions.moments,
                          self.feet + directions.feet, self.com + directions.com)

    def shifted(self, columns):
        """Trajectory advanced by ``columns``, the tail padded with the last column"""
        if columns <= 0:
            return self.copy()
        index = np.minimum(np.arange(self.h) + columns, self.h - 1)
        return type(self)(self.forces[index], self.moments[index], self.feet[index], self.com[index])

    def conform(self, bundle, mass, gravity=9.81):
        """Copy made consistent with the contact schedule and foot groups of ``bundle``.

           Swing wrenches are zeroed (stance columns without force get the
           weight split), planted feet are put back on their footholds and
           every foot group shares the value of its first column.
        """
        schedule = bundle.schedule
        result = self.copy()
        guess = type(self).initial_guess(bundle, mass, gravity)
        for k in range(self.h):
            for leg in range(N_LEGS):
                if not schedule.stance(leg, k):
                    result.forces[k, leg] = 0.0
                    result.moments[k, leg] = 0.0
                elif result.forces[k, leg, 2] <= 0.0:
                    result.forces[k, leg] = guess.forces[k, leg]
                    result.moments[k, leg] = 0.0
        for leg in range(N_LEGS):
            for columns, planted in foot_groups(schedule, leg):
                value = bundle.feet0[leg] if planted else result.feet[columns[0], leg]
                result.feet[columns, leg] = value
        result.com[0] = bundle.p_c_ref[0]
        return result

    def contact_config(self, k, mass, gravity=9.81):
        return ContactConfig(self.forces[k], self.moments[k], self.feet[k], self.com[k], mass, gravity)

    def next_targets(self, schedule):
        """Next foothold of each leg: the landing target of its next swing, else its current foot"""
        targets = np.array(self.feet[0])
        for leg in range(N_LEGS):
            window = schedule.next_window(leg)
            if window is not None and max(window.start, 0) < self.h:
                targets[leg] = self.feet[max(window.start, 0), leg]
        return targets


def foot_groups(schedule, leg):
    """Column groups sharing one foot location: [(columns, planted)].

       A group starts at a swing window and lasts until the next swing of
       the same leg; columns before the first swing keep the planted foot.
    """
    h = schedule.h
    starts = [max(window.start, 0) for window in schedule.windows(leg)]
    groups = []
    if not starts or starts[0] > 0:
        end = starts[0] if starts else h
        groups.append((list(range(0, end)), True))
    for index, start in enumerate(starts):
        end = starts[index + 1] if index + 1 < len(starts) else h
        groups.append((list(range(start, end)), False))
    return groups

"""
Condensed convex MPC subproblem.

The states are eliminated by rolling the linearized dynamics out from the
measured state, so the QP is posed in the search directions only.

Variable vector, for a horizon of h steps:

    [wrenches (12 h) | CoM (3 h) | foot variables]

Wrenches are ordered per step and leg as (df, dtau). With shared foot
variables each foot group (one footstep) owns a single 3-vector and the
stance stationarity holds by construction; otherwise every step has its
own foot variables (21 h entries in total) tied by equality rows.
"""

import logging

import numpy as np

from ..qp import QuadraticProgram
from .linearize import STATE_SIZE, linearize_dynamics
from .params import WrenchBounds
from .trajectory import N_LEGS, STEP_SIZE, SearchDirections, com_index, foot_index, force_index, \
    foot_groups, moment_index

__all__ = [
    "FootGroup",
    "VariableLayout",
    "CmpcSubproblem",
    "assemble_subproblem",
]

LOG = logging.getLogger(__name__)

WRENCH_SIZE = 6


class FootGroup(object):
    def __init__(self, leg, columns, planted, next_step, indices):
        self.leg = leg
        self.columns = columns
        self.planted = planted
        self.next_step = next_step
        self.indices = indices

    def __repr__(self):
        return "{}(leg={!r}, columns={!r}, planted={!r}, next_step={!r})".format(
            type(self).__name__, self.leg, self.columns, self.planted, self.next_step)


class VariableLayout(object):
    """Maps the per-step search directions onto the QP variable vector"""

    def __init__(self, schedule, share_foot_variables=True):
        self.h = schedule.h
        self.share_foot_variables = bool(share_foot_variables)
        n = (N_LEGS * WRENCH_SIZE + 3) * self.h
        self.foot_columns = np.full((self.h, N_LEGS), -1, dtype=int)
        self.groups = []
        for leg in range(N_LEGS):
            first_free = True
            for columns, planted in foot_groups(schedule, leg):
                next_step = first_free and not planted
                if not planted:
                    first_free = False
                indices = []
                for k in columns:
                    if not indices or not self.share_foot_variables:
                        indices.append(n)
                        n += 3
                    self.foot_columns[k, leg] = indices[-1]
                self.groups.append(FootGroup(leg, columns, planted, next_step, indices))
        self.n = n

    def force(self, k, leg):
        start = (N_LEGS * k + leg) * WRENCH_SIZE
        return np.arange(start, start + 3)

    def moment(self, k, leg):
        start = (N_LEGS * k + leg) * WRENCH_SIZE + 3
        return np.arange(start, start + 3)

    def com(self, k):
        start = N_LEGS * WRENCH_SIZE * self.h + 3 * k
        return np.arange(start, start + 3)

    def foot(self, k, leg):
        start = self.foot_columns[k, leg]
        return np.arange(start, start + 3)

    def step_indices(self, k):
        """Variable index of each of the 21 search-direction entries of step k"""
        index = np.zeros(STEP_SIZE, dtype=int)
        for leg in range(N_LEGS):
            index[force_index(leg)] = self.force(k, leg)
            index[moment_index(leg)] = self.moment(k, leg)
            index[foot_index(leg)] = self.foot(k, leg)
        index[com_index()] = self.com(k)
        return index

    def selector(self, indices):
        rows = np.zeros((len(indices), self.n))
        rows[np.arange(len(indices)), indices] = 1.0
        return rows


class CmpcSubproblem(object):
    """QP of one sequential iteration with the data to interpret its solution"""

    def __init__(self, qp, layout, rollout, dt):
        self.qp = qp
        self.layout = layout
        self.rollout = rollout
        self.dt = dt

    @property
    def n(self):
        return self.qp.n

    def directions(self, z):
        """SearchDirections of a QP solution"""
        z = np.asarray(z, dtype=float)
        steps = np.array([z[self.layout.step_indices(k)] for k in range(self.layout.h)])
        return SearchDirections.from_steps(steps)

    def predict(self, z):
        """(h + 1, 12) predicted centroidal states [H; h]"""
        z = np.asarray(z, dtype=float)
        return np.array([offset + matrix @ z for offset, matrix in self.rollout])


class _CostBuilder(object):
    """Accumulates sum w_i (R_i z + s_i)^2 / 2 into (P, g)"""

    def __init__(self, n):
        self.P = np.zeros((n, n))
        self.g = np.zeros(n)

    def add(self, rows, offset, weights):
        weights = np.asarray(weights, dtype=float)
        active = weights > 0.0
        if not np.any(active):
            return
        rows = rows[active]
        offset = np.asarray(offset, dtype=float)[active]
        weights = weights[active]
        self.P += rows.T @ (weights[:, None] * rows)
        self.g += rows.T @ (weights * offset)


class _RowBuilder(object):
    def __init__(self, n):
        self.n = n
        self.rows = []
        self.lower = []
        self.upper = []

    def add(self, row, lower, upper):
        self.rows.append(row)
        self.lower.append(lower)
        self.upper.append(upper)

    def unit_row(self, coefficients):
        row = np.zeros(self.n)
        for index, value in coefficients:
            row[index] += value
        return row

    def arrays(self):
        if not self.rows:
            return None, None, None
        return np.array(self.rows), np.array(self.lower), np.array(self.upper)


def _pin(lb, ub, indices, values):
    lb[indices] = values
    ub[indices] = values


def assemble_subproblem(refs, x0, dt, u_prev, schedule, bounds, weights, wrench=None, mass=None, gravity=9.81,
                        planar=False, share_foot_variables=True):
    """Builds the convex subproblem of one sequential iteration.

       Parameters
       ----------
       refs: ReferenceBundle
       x0: CentroidalState
           measured centroidal state
       dt: float
       u_prev: ControlTrajectory
           total solution of the previous iteration
       schedule: ContactSchedule
       bounds: sequence of FootBounds or None, indexed by leg
           bounds of each leg's next foothold
       weights: MpcWeights
       wrench: WrenchBounds, optional
       mass: float
       planar: bool
           pins the out-of-plane components (y, roll, yaw)

       Returns
       -------
       CmpcSubproblem
    """
    if wrench is None:
        wrench = WrenchBounds()
    if mass is None:
        raise ValueError("mass is required")
    h = schedule.h
    if u_prev.h != h or refs.h != h:
        raise ValueError("horizon mismatch: schedule {}, references {}, solution {}".format(h, refs.h, u_prev.h))
    if dt <= 0.0:
        raise ValueError("dt must be positive, got {!r}".format(dt))
    layout = VariableLayout(schedule, share_foot_variables)
    n = layout.n

    offset = x0.as_vector()
    matrix = np.zeros((STATE_SIZE, n))
    rollout = [(offset, matrix)]
    for k in range(h):
        step = linearize_dynamics(x0, u_prev.contact_config(k, mass, gravity), dt)
        offset = step.A @ offset + step.C
        matrix = step.A @ matrix
        matrix[:, layout.step_indices(k)] += step.B
        rollout.append((offset, matrix))

    cost = _CostBuilder(n)
    for k in range(1, h + 1):
        offset, matrix = rollout[k]
        cost.add(matrix[6:12], offset[6:12] - refs.h_ref[k], weights.L1_h)
        cost.add(matrix[0:6], offset[0:6] - refs.H_ref[k], weights.L1_H)
    for k in range(h):
        for leg in range(N_LEGS):
            cost.add(layout.selector(layout.foot(k, leg)), u_prev.feet[k, leg] - refs.p_f_ref[k, leg], weights.L1_pf)
            cost.add(layout.selector(layout.force(k, leg)), u_prev.forces[k, leg], weights.L2_f)
            cost.add(layout.selector(layout.moment(k, leg)), u_prev.moments[k, leg], weights.L2_tau)
        cost.add(layout.selector(layout.com(k)), u_prev.com[k] - refs.p_c_ref[k], weights.L1_pc)

    lb = np.full(n, -np.inf)
    ub = np.full(n, np.inf)
    equalities = _RowBuilder(n)
    inequalities = _RowBuilder(n)
    axes = (0, 2) if planar else (0, 1, 2)

    # CoM positions follow the linear momentum
    for k in range(h - 1):
        offset, matrix = rollout[k]
        for axis in axes:
            row = -dt / mass * matrix[6 + axis]
            row[layout.com(k + 1)[axis]] += 1.0
            row[layout.com(k)[axis]] -= 1.0
            value = u_prev.com[k, axis] - u_prev.com[k + 1, axis] + dt / mass * offset[6 + axis]
            equalities.add(row, value, value)
    _pin(lb, ub, layout.com(0), refs.p_c_ref[0] - u_prev.com[0])
    if planar:
        for k in range(1, h):
            index = layout.com(k)[1]
            _pin(lb, ub, index, refs.p_c_ref[0, 1] - u_prev.com[k, 1])

    mu = wrench.mu_box
    half_foot = 0.5 * wrench.foot_length
    for k in range(h):
        for leg in range(N_LEGS):
            f_idx = layout.force(k, leg)
            t_idx = layout.moment(k, leg)
            f_prev = u_prev.forces[k, leg]
            t_prev = u_prev.moments[k, leg]
            if not schedule.stance(leg, k):
                _pin(lb, ub, f_idx, -f_prev)
                _pin(lb, ub, t_idx, -t_prev)
                continue
            lb[f_idx[2]] = wrench.f_min - f_prev[2]
            ub[f_idx[2]] = wrench.f_max - f_prev[2]
            for axis in axes[:-1]:
                # -mu f_z <= f_t <= mu f_z
                row = inequalities.unit_row([(f_idx[axis], 1.0), (f_idx[2], -mu)])
                inequalities.add(row, -np.inf, -(f_prev[axis] - mu * f_prev[2]))
                row = inequalities.unit_row([(f_idx[axis], -1.0), (f_idx[2], -mu)])
                inequalities.add(row, -np.inf, f_prev[axis] + mu * f_prev[2])
            if planar:
                _pin(lb, ub, f_idx[1], -f_prev[1])
                _pin(lb, ub, t_idx[2], -t_prev[2])
            else:
                lb[t_idx[2]] = wrench.tau_min - t_prev[2]
                ub[t_idx[2]] = wrench.tau_max - t_prev[2]
            _pin(lb, ub, t_idx[0], -t_prev[0])
            if half_foot > 0.0:
                row = inequalities.unit_row([(t_idx[1], 1.0), (f_idx[2], -half_foot)])
                inequalities.add(row, -np.inf, -(t_prev[1] - half_foot * f_prev[2]))
                row = inequalities.unit_row([(t_idx[1], -1.0), (f_idx[2], -half_foot)])
                inequalities.add(row, -np.inf, t_prev[1] + half_foot * f_prev[2])
            else:
                _pin(lb, ub, t_idx[1], -t_prev[1])

    for group in layout.groups:
        leg = group.leg
        first = group.columns[0]
        index = np.arange(group.indices[0], group.indices[0] + 3)
        previous = u_prev.feet[first, leg]
        if group.planted:
            _pin(lb, ub, index, refs.feet0[leg] - previous)
        else:
            leg_bounds = None if bounds is None else bounds[leg]
            if group.next_step and leg_bounds is not None:
                lb[index] = leg_bounds.lower - previous
                ub[index] = leg_bounds.upper - previous
                if leg_bounds.height is not None:
                    _pin(lb, ub, index[2], leg_bounds.height - previous[2])
            else:
                _pin(lb, ub, index[2], refs.p_f_ref[first, leg, 2] - previous[2])
            if planar:
                _pin(lb, ub, index[1], refs.feet0[leg, 1] - previous[1])
        for k_a, k_b in zip(group.columns, group.columns[1:]):
            a, b = layout.foot(k_a, leg), layout.foot(k_b, leg)
            if a[0] == b[0]:
                continue
            for axis in range(3):
                row = equalities.unit_row([(b[axis], 1.0), (a[axis], -1.0)])
                value = u_prev.feet[k_a, leg, axis] - u_prev.feet[k_b, leg, axis]
                equalities.add(row, value, value)

    A_eq, b_eq, _ = equalities.arrays()
    A_in, l_in, u_in = inequalities.arrays()
    qp = QuadraticProgram(0.5 * (cost.P + cost.P.T), cost.g, A_eq=A_eq, b_eq=b_eq, A_in=A_in, l_in=l_in, u_in=u_in,
                          lb=lb, ub=ub)
    LOG.debug("cmpc subproblem: %d variables, %d equalities, %d inequalities", qp.n, qp.m_eq, qp.m_in)
    return CmpcSubproblem(qp, layout, rollout, dt)

"""
Planar multiple-shooting transcription shared by the baseline NMPCs.

Decision variables are stacked step by step, the state at column 0 being
the measured one:

    z = [q_1, v_1, (tau_0), lam_0 | ... | q_h, v_h, (tau_h-1), lam_h-1 | dt_0 ... dt_s-1]

Coordinates are reduced to ``model.dofs``; a contact force ``lam`` keeps
its x and z components. When the sampling time is optimized there is one
dt per half-horizon segment of ``h_swing`` steps.
"""

import logging

import numpy as np

from ..errors import ModelError
from ..kinematics import forward_kinematics, point_jacobian
from ..qp import NonlinearProgram
from ..utils import make_rng

__all__ = [
    "BaselineResult",
    "DtMode",
    "PlanarTranscription",
    "foot_terms",
]

LOG = logging.getLogger(__name__)

PLANAR_ROWS = (0, 2)
N_LEGS = 2


class DtMode(object):
    """How a baseline picks its sampling times.

       fixed: every segment uses ``value``
       random: ``value`` if given, else one uniform draw per segment in ``bounds``
       optimized: one decision variable per segment, boxed by ``bounds``
    """

    FIXED = "fixed"
    RANDOM = "random"
    OPTIMIZED = "optimized"
    KINDS = (FIXED, RANDOM, OPTIMIZED)

    def __init__(self, kind, value=None, bounds=(0.03, 0.06), seed=0):
        if kind not in self.KINDS:
            raise ValueError("unknown dt mode {!r}".format(kind))
        lower, upper = (float(b) for b in bounds)
        if not 0.0 < lower <= upper:
            raise ValueError("invalid dt bounds {!r}".format(bounds))
        if kind == self.FIXED and value is None:
            raise ValueError("fixed dt mode needs a value")
        if value is not None and value <= 0.0:
            raise ValueError("dt must be positive, got {!r}".format(value))
        self.kind = kind
        self.value = None if value is None else float(value)
        self.bounds = (lower, upper)
        self.seed = seed

    @classmethod
    def fixed(cls, value):
        return cls(cls.FIXED, value=value)

    @classmethod
    def random(cls, value=None, bounds=(0.03, 0.06), seed=0):
        return cls(cls.RANDOM, value=value, bounds=bounds, seed=seed)

    @classmethod
    def optimized(cls, bounds=(0.03, 0.06), initial=None):
        return cls(cls.OPTIMIZED, value=initial, bounds=bounds)

    @classmethod
    def parse(cls, text, bounds=(0.03, 0.06)):
        """'fixed:0.05', 'random', 'random:0.04' or 'optimized'"""
        kind, _, value = str(text).partition(":")
        value = float(value) if value else None
        return cls(kind.strip(), value=value, bounds=bounds)

    @property
    def optimize(self):
        return self.kind == self.OPTIMIZED

    def initial(self, n_segments):
        if self.value is not None:
            return np.full(n_segments, self.value)
        if self.kind == self.RANDOM:
            return make_rng(self.seed, "dt").uniform(self.bounds[0], self.bounds[1], n_segments)
        return np.full(n_segments, 0.5 * (self.bounds[0] + self.bounds[1]))

    def __repr__(self):
        return "{}(kind={!r}, value={!r}, bounds={!r})".format(type(self).__name__, self.kind, self.value, self.bounds)


def foot_terms(model, q, kin=None):
    """Sagittal foot positions (2, 2) and their Jacobians (2, 2, n_dofs)"""
    if kin is None:
        kin = forward_kinematics(model, q)
    positions = np.zeros((N_LEGS, 2))
    jacobians = np.zeros((N_LEGS, 2, model.dofs.size))
    for leg_index, leg in enumerate(model.legs):
        index = model.contact_index(leg.contact)
        point = kin.contacts[index]
        jac = point_jacobian(kin, model.contacts[index].link, point)
        positions[leg_index] = point[list(PLANAR_ROWS)]
        jacobians[leg_index] = jac[np.ix_(PLANAR_ROWS, model.dofs)]
    return positions, jacobians


class PlanarTranscription(NonlinearProgram):
    """Variable layout, bounds, friction rows and tracking cost of a
       planar multiple-shooting NMPC; subclasses add the dynamics.
    """

    with_torque = False

    def __init__(self, model, state, refs, schedule, dt_mode, mu=0.7, f_max=250.0, fd_step=1e-6):
        if not model.planar:
            raise ModelError("{}: the baseline NMPCs need a planar model".format(model.name))
        self.model = model
        self.q0, self.qd0 = model.check_state(state.q, state.qd)
        self.refs = refs
        self.schedule = schedule
        self.dt_mode = dt_mode
        self.mu = float(mu)
        self.f_max = float(f_max)
        self.fd_step = fd_step
        self.dofs = model.dofs
        self.n_d = self.dofs.size
        self.n_j = model.n_j
        self.h = schedule.h
        self.h_swing = schedule.h_swing
        self.n_segments = -(-self.h // self.h_swing)
        self.dt_values = dt_mode.initial(self.n_segments)
        blocks = [("q", self.n_d), ("v", self.n_d)]
        if self.with_torque:
            blocks.append(("tau", self.n_j))
        blocks.append(("lam", 2 * N_LEGS))
        self._blocks = {}
        offset = 0
        for name, size in blocks:
            self._blocks[name] = (offset, size)
            offset += size
        self.block = offset
        self.n_steps = self.h * self.block
        self.n = self.n_steps + (self.n_segments if dt_mode.optimize else 0)
        self.anchors = np.array([[refs.p_f_ref[k, leg][list(PLANAR_ROWS)] for leg in range(N_LEGS)]
                                 for k in range(self.h)])
        self.lb, self.ub = self._variable_bounds()
        self._friction, self._friction_lower, self._friction_upper = self._friction_rows()

    # layout
    def index(self, k, name):
        offset, size = self._blocks[name]
        start = k * self.block + offset
        return slice(start, start + size)

    def dt_index(self, k):
        return self.n_steps + k // self.h_swing

    def stance(self, leg, k):
        return self.schedule.stance(leg, k)

    def step_dt(self, z, k):
        if self.dt_mode.optimize:
            return float(z[self.dt_index(k)])
        return float(self.dt_values[k // self.h_swing])

    def state_at(self, z, k):
        """Reduced (q_k, v_k); column 0 is the measured state"""
        if k == 0:
            return self.q0[self.dofs], self.qd0[self.dofs]
        return z[self.index(k - 1, "q")], z[self.index(k - 1, "v")]

    def full(self, q_reduced):
        q = self.q0.copy()
        q[self.dofs] = q_reduced
        return q

    def forces(self, z, k):
        """(2, 2) sagittal contact forces of step k"""
        return z[self.index(k, "lam")].reshape(N_LEGS, 2)

    def weight_split(self, k):
        lam = np.zeros((N_LEGS, 2))
        count = self.schedule.stance_count(k)
        if count:
            for leg in range(N_LEGS):
                if self.stance(leg, k):
                    lam[leg, 1] = self.model.mass * self.model.gravity / count
        return lam

    # bounds
    def _variable_bounds(self):
        lb = np.full(self.n, -np.inf)
        ub = np.full(self.n, np.inf)
        limits = self.model.joint_limits()
        torques = self.model.torque_limits()
        for k in range(self.h):
            q_slice = self.index(k, "q")
            lb[q_slice][self.n_d - self.n_j:] = limits[:, 0]
            ub[q_slice][self.n_d - self.n_j:] = limits[:, 1]
            if self.with_torque:
                lb[self.index(k, "tau")] = -torques
                ub[self.index(k, "tau")] = torques
            lam_slice = self.index(k, "lam")
            lam_lb = np.zeros((N_LEGS, 2))
            lam_ub = np.zeros((N_LEGS, 2))
            for leg in range(N_LEGS):
                if self.stance(leg, k):
                    lam_lb[leg] = (-self.mu * self.f_max, 0.0)
                    lam_ub[leg] = (self.mu * self.f_max, self.f_max)
            lb[lam_slice] = lam_lb.ravel()
            ub[lam_slice] = lam_ub.ravel()
        if self.dt_mode.optimize:
            lb[self.n_steps:] = self.dt_mode.bounds[0]
            ub[self.n_steps:] = self.dt_mode.bounds[1]
        return lb, ub

    def _friction_rows(self):
        rows = []
        lower = []
        upper = []
        for k in range(self.h):
            start = self.index(k, "lam").start
            for leg in range(N_LEGS):
                if not self.stance(leg, k):
                    continue
                i_x, i_z = start + 2 * leg, start + 2 * leg + 1
                for sign in (-1.0, 1.0):
                    row = np.zeros(self.n)
                    row[i_x] = 1.0
                    row[i_z] = sign * self.mu
                    rows.append(row)
                    if sign < 0.0:
                        lower.append(-np.inf)
                        upper.append(0.0)
                    else:
                        lower.append(0.0)
                        upper.append(np.inf)
        if not rows:
            return np.zeros((0, self.n)), np.zeros(0), np.zeros(0)
        return np.array(rows), np.array(lower), np.array(upper)

    def inequality(self, z):
        return self._friction @ z, self._friction_lower, self._friction_upper

    def inequality_jacobian(self, z):
        return self._friction

    # tracking cost
    def tracking(self):
        """(sqrt weights, reference) of the linear tracking residual over the step blocks"""
        raise NotImplementedError

    def _linear_residual(self, z):
        sqrt_w, reference = self.tracking()
        return sqrt_w * (z[:self.n_steps] - reference)

    def _linear_residual_jacobian(self):
        sqrt_w, _ = self.tracking()
        jac = np.zeros((self.n_steps, self.n))
        jac[:, :self.n_steps] = np.diag(sqrt_w)
        return jac

    def residual(self, z):
        return self._linear_residual(z)

    def residual_jacobian(self, z):
        return self._linear_residual_jacobian()

    # shared equality blocks
    def contact_count(self, k):
        return 2 * self.schedule.stance_count(k)

    def kinematic_rows(self, z, k, dt):
        q_k, _ = self.state_at(z, k)
        q_next = z[self.index(k, "q")]
        v_next = z[self.index(k, "v")]
        return q_next - q_k - dt * v_next

    def kinematic_jacobian(self, jac, row, z, k, dt):
        rows = slice(row, row + self.n_d)
        v_next = z[self.index(k, "v")]
        eye = np.eye(self.n_d)
        jac[rows, self.index(k, "q")] = eye
        jac[rows, self.index(k, "v")] = -dt * eye
        if k > 0:
            jac[rows, self.index(k - 1, "q")] = -eye
        if self.dt_mode.optimize:
            jac[rows, self.dt_index(k)] -= v_next

    def contact_rows(self, z, k, terms=None):
        if terms is None:
            terms = foot_terms(self.model, self.full(z[self.index(k, "q")]))
        positions, _ = terms
        values = [positions[leg] - self.anchors[k, leg] for leg in range(N_LEGS) if self.stance(leg, k)]
        return np.concatenate(values) if values else np.zeros(0)

    def contact_jacobian(self, jac, row, z, k, terms=None):
        if terms is None:
            terms = foot_terms(self.model, self.full(z[self.index(k, "q")]))
        _, jacobians = terms
        for leg in range(N_LEGS):
            if self.stance(leg, k):
                jac[row:row + 2, self.index(k, "q")] = jacobians[leg]
                row += 2
        return row

    # iterates
    def initial_guess(self):
        z = np.zeros(self.n)
        refs = self.refs
        for k in range(self.h):
            z[self.index(k, "q")] = refs.q_ref[k + 1][self.dofs]
            z[self.index(k, "v")] = refs.qd_ref[k + 1][self.dofs]
            z[self.index(k, "lam")] = self.weight_split(k).ravel()
        if self.dt_mode.optimize:
            z[self.n_steps:] = self.dt_values
        return np.clip(z, self.lb, self.ub)

    def trajectories(self, z):
        """Full-coordinate q and qd (h + 1 columns), forces (h, 2, 3), dt per segment"""
        q = np.zeros((self.h + 1, self.model.nq))
        qd = np.zeros((self.h + 1, self.model.nq))
        q[0] = self.q0
        qd[0] = self.qd0
        forces = np.zeros((self.h, N_LEGS, 3))
        for k in range(self.h):
            q[k + 1] = self.q0
            q[k + 1][self.dofs] = z[self.index(k, "q")]
            qd[k + 1][self.dofs] = z[self.index(k, "v")]
            forces[k][:, list(PLANAR_ROWS)] = self.forces(z, k)
        if self.dt_mode.optimize:
            dt = z[self.n_steps:].copy()
        else:
            dt = self.dt_values.copy()
        return q, qd, forces, dt

    def friction_violation(self, z):
        values, lower, upper = self.inequality(z)
        violation = 0.0
        if values.size:
            violation = float(max(np.max(lower - values), np.max(values - upper), 0.0))
        gating = 0.0
        for k in range(self.h):
            lam = self.forces(z, k)
            for leg in range(N_LEGS):
                if not self.stance(leg, k):
                    gating = max(gating, float(np.max(np.abs(lam[leg]))))
        return max(violation, gating)


class BaselineResult(object):
    """Trajectories of a baseline solve plus its SQP diagnostics.

       ``tau`` is None for the kino-dynamic baseline. ``flagged`` marks a
       best iterate returned without convergence.
    """

    def __init__(self, kind, q, qd, tau, forces, dt, sqp, dynamics_residual, friction_violation, wall_time,
                 h_swing, z=None):
        self.kind = kind
        self.q = q
        self.qd = qd
        self.tau = tau
        self.forces = forces
        self.dt = dt
        self.sqp = sqp
        self.dynamics_residual = dynamics_residual
        self.friction_violation = friction_violation
        self.wall_time = wall_time
        self.h_swing = h_swing
        self.z = z

    @property
    def converged(self):
        return self.sqp.converged

    @property
    def flagged(self):
        return not self.sqp.converged

    @property
    def dt_steps(self):
        return np.repeat(self.dt, self.h_swing)[:self.forces.shape[0]]

    def as_row(self, t=None):
        """Row of the shared MPC diagnostics CSV"""
        return {
            "time": "" if t is None else t,
            "mode": self.kind,
            "iterations": self.sqp.iterations,
            "qp_count": self.sqp.qp_count,
            "converged": int(self.converged),
            "fallback": 0,
            "relaxed": 0,
            "dt_final": float(self.dt[0]),
            "wall_time": self.wall_time,
            "bound_violation": 0,
        }

    def __repr__(self):
        return "{}(kind={!r}, status={}, dt={!r}, wall_time={:.3f})".format(
            type(self).__name__, self.kind, self.sqp.status.value, self.dt.tolist(), self.wall_time)

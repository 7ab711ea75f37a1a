"""
Planar whole-body NMPC.

Direct multiple shooting with semi-implicit Euler on the full rigid-body
dynamics; step k carries q_k+1, v_k+1, the joint torques and the contact
forces:

    M(q_k) (v_k+1 - v_k) / dt + C(q_k, v_k) - S tau_k - J(q_k)^T lam_k = 0
    q_k+1 - q_k - dt v_k+1 = 0
    p_i(q_k+1) = anchor_i                       (stance feet)

The blocks in v_k+1, tau_k, lam_k and dt are exact; only the dependence
on (q_k, v_k) is differenced.
"""

import logging
import time

import numpy as np

from ..dynamics import dynamics_terms
from ..kinematics import forward_kinematics, load_model
from ..qp import SqpOptions, solve_sqp
from ..utils import numerical_jacobian
from .params import BaselineSettings, WbWeights
from .transcription import BaselineResult, DtMode, PlanarTranscription, foot_terms

__all__ = [
    "WholeBodyNlp",
    "solve_wb_mpc",
]

LOG = logging.getLogger(__name__)


class WholeBodyNlp(PlanarTranscription):
    with_torque = True

    def __init__(self, model, state, refs, schedule, dt_mode, weights, mu=0.7, f_max=250.0, fd_step=1e-6):
        super().__init__(model, state, refs, schedule, dt_mode, mu=mu, f_max=f_max, fd_step=fd_step)
        self.weights = weights
        step_weights = weights.step_weights(self.n_j)
        self._sqrt_w = np.tile(np.sqrt(step_weights), self.h)
        reference = np.zeros(self.n_steps)
        for k in range(self.h):
            reference[self.index(k, "q")] = refs.q_ref[k + 1][self.dofs]
            reference[self.index(k, "v")] = refs.qd_ref[k + 1][self.dofs]
        self._reference = reference
        self._rows = []
        row = 0
        for k in range(self.h):
            self._rows.append(row)
            row += 2 * self.n_d + self.contact_count(k)
        self.n_eq = row

    def tracking(self):
        return self._sqrt_w, self._reference

    def _velocity(self, v_reduced):
        qd = np.zeros(self.model.nq)
        qd[self.dofs] = v_reduced
        return qd

    def _dynamics(self, q_k, v_k, v_next, tau, lam, dt):
        q = self.full(q_k)
        kin = forward_kinematics(self.model, q)
        terms = dynamics_terms(self.model, q, self._velocity(v_k), kin=kin)
        _, jacobians = foot_terms(self.model, q, kin=kin)
        contact = jacobians.reshape(-1, self.n_d)
        return terms.M @ (v_next - v_k) / dt + terms.C - terms.S @ tau - contact.T @ lam

    def _step_values(self, z, k):
        q_k, v_k = self.state_at(z, k)
        return q_k, v_k, z[self.index(k, "v")], z[self.index(k, "tau")], z[self.index(k, "lam")], self.step_dt(z, k)

    def dynamics_rows(self, z, k):
        return self._dynamics(*self._step_values(z, k))

    def equality(self, z):
        values = np.zeros(self.n_eq)
        for k in range(self.h):
            row = self._rows[k]
            dt = self.step_dt(z, k)
            values[row:row + self.n_d] = self.dynamics_rows(z, k)
            values[row + self.n_d:row + 2 * self.n_d] = self.kinematic_rows(z, k, dt)
            contact = self.contact_rows(z, k)
            values[row + 2 * self.n_d:row + 2 * self.n_d + contact.size] = contact
        return values

    def equality_jacobian(self, z):
        jac = np.zeros((self.n_eq, self.n))
        n_d = self.n_d
        for k in range(self.h):
            row = self._rows[k]
            rows = slice(row, row + n_d)
            q_k, v_k, v_next, tau, lam, dt = self._step_values(z, k)
            q = self.full(q_k)
            kin = forward_kinematics(self.model, q)
            terms = dynamics_terms(self.model, q, self._velocity(v_k), kin=kin)
            _, jacobians = foot_terms(self.model, q, kin=kin)
            contact = jacobians.reshape(-1, n_d)
            jac[rows, self.index(k, "v")] = terms.M / dt
            jac[rows, self.index(k, "tau")] = -terms.S
            jac[rows, self.index(k, "lam")] = -contact.T
            if self.dt_mode.optimize:
                jac[rows, self.dt_index(k)] -= terms.M @ (v_next - v_k) / dt ** 2
            if k > 0:
                local = numerical_jacobian(
                    lambda x: self._dynamics(x[:n_d], x[n_d:], v_next, tau, lam, dt),
                    np.concatenate([q_k, v_k]), self.fd_step)
                jac[rows, self.index(k - 1, "q")] = local[:, :n_d]
                jac[rows, self.index(k - 1, "v")] = local[:, n_d:]
            self.kinematic_jacobian(jac, row + n_d, z, k, dt)
            self.contact_jacobian(jac, row + 2 * n_d, z, k)
        return jac

    def dynamics_residual(self, z):
        """Infinity norm of M qdd + C - S tau - J^T lam over the horizon"""
        return float(max(np.max(np.abs(self.dynamics_rows(z, k))) for k in range(self.h)))

    def initial_guess(self):
        z = super().initial_guess()
        for k in range(self.h):
            q_k, v_k, v_next, _, lam, dt = self._step_values(z, k)
            # joint rows of the dynamics solved for the torques
            residual = self._dynamics(q_k, v_k, v_next, np.zeros(self.n_j), lam, dt)
            z[self.index(k, "tau")] = residual[self.n_d - self.n_j:]
        return np.clip(z, self.lb, self.ub)


def solve_wb_mpc(state, refs, schedule, weights=None, dt_mode=None, model=None, options=None, qp_settings=None,
                 settings=None, z_warm=None):
    """Planar whole-body NMPC over the horizon of ``refs``.

       Parameters
       ----------
       state: object with ``q`` and ``qd``
       refs: ReferenceBundle
       schedule: ContactSchedule
       weights: WbWeights, optional
       dt_mode: DtMode, optional
           defaults to the sampling time of ``refs``
       model: RobotModel, optional
           planar model, the packaged biped by default
       z_warm: array, optional
           decision vector of an earlier solve with the same layout

       Returns
       -------
       BaselineResult
           the best iterate; ``flagged`` when the SQP did not converge

       Raises
       ------
       ModelError
           for a non-planar model
    """
    t_start = time.perf_counter()
    if model is None:
        model = load_model("biped2d")
    if settings is None:
        settings = BaselineSettings.from_config()
    if weights is None:
        weights = WbWeights.from_config()
    if dt_mode is None:
        dt_mode = DtMode.fixed(refs.dt)
    if options is None:
        options = SqpOptions.from_config(max_iter=settings.sqp_max_iter)
    nlp = WholeBodyNlp(model, state, refs, schedule, dt_mode, weights, mu=settings.mu, f_max=settings.f_max)
    z0 = nlp.initial_guess() if z_warm is None else np.clip(z_warm, nlp.lb, nlp.ub)
    sqp = solve_sqp(nlp, z0, options=options, qp_settings=qp_settings)
    q, qd, forces, dt = nlp.trajectories(sqp.z)
    tau = np.array([sqp.z[nlp.index(k, "tau")] for k in range(nlp.h)])
    result = BaselineResult("wholebody", q, qd, tau, forces, dt, sqp, nlp.dynamics_residual(sqp.z),
                            nlp.friction_violation(sqp.z), time.perf_counter() - t_start, nlp.h_swing, z=sqp.z)
    if result.flagged:
        LOG.warning("whole-body NMPC %s after %d iterations (violation %.2e)", sqp.status.value, sqp.iterations,
                    sqp.violation)
    LOG.debug("%r", result)
    return result

"""
Planar explicit kino-dynamic NMPC.

The joint states stay decision variables; the dynamics are the centroidal
momentum balance read through the momentum map h = A_G(q) v:

    A_G(q_k+1) v_k+1 - A_G(q_k) v_k = dt [sum lam + m g; sum (p_i(q_k) - p_c(q_k)) x lam_i]

with the multiple-shooting kinematics and stance-foot anchoring shared
with the whole-body baseline. Momentum rows are (l_x, l_z, k_y).
"""

import logging
import time

import numpy as np

from ..kinematics import centroidal_matrix, forward_kinematics, load_model
from ..qp import SqpOptions, solve_sqp
from ..utils import numerical_jacobian
from .params import BaselineSettings, KdWeights
from .transcription import N_LEGS, BaselineResult, DtMode, PlanarTranscription, foot_terms

__all__ = [
    "KinoDynamicNlp",
    "solve_explicit_kd",
]

LOG = logging.getLogger(__name__)

MOMENTUM_ROWS = (0, 2, 4)
N_MOMENTUM = len(MOMENTUM_ROWS)


class KinoDynamicNlp(PlanarTranscription):
    with_torque = False

    def __init__(self, model, state, refs, schedule, dt_mode, weights, mu=0.7, f_max=250.0, fd_step=1e-6):
        super().__init__(model, state, refs, schedule, dt_mode, mu=mu, f_max=f_max, fd_step=fd_step)
        self.weights = weights
        self._sqrt_w = np.tile(np.sqrt(weights.step_weights(self.n_j)), self.h)
        self._sqrt_r1 = np.sqrt(weights.momentum_weights())
        reference = np.zeros(self.n_steps)
        for k in range(self.h):
            reference[self.index(k, "q")] = refs.q_ref[k + 1][self.dofs]
            reference[self.index(k, "v")] = refs.qd_ref[k + 1][self.dofs]
            reference[self.index(k, "lam")] = self.weight_split(k).ravel()
        self._reference = reference
        self._h_ref = np.asarray(refs.h_ref)[1:self.h + 1][:, list(MOMENTUM_ROWS)]
        self._rows = []
        row = 0
        for k in range(self.h):
            self._rows.append(row)
            row += N_MOMENTUM + self.n_d + self.contact_count(k)
        self.n_eq = row

    def tracking(self):
        return self._sqrt_w, self._reference

    def momentum_matrix(self, q_reduced):
        """Planar rows of A_G on the reduced coordinates, and the sagittal CoM"""
        a_g, p_c = centroidal_matrix(self.model, self.full(q_reduced))
        return a_g[np.ix_(MOMENTUM_ROWS, self.dofs)], p_c[[0, 2]]

    def momentum(self, q_reduced, v_reduced):
        return self.momentum_matrix(q_reduced)[0] @ v_reduced

    def rates(self, q_reduced, lam):
        """(l_x, l_z, k_y) rates of the contact forces at configuration q"""
        q = self.full(q_reduced)
        kin = forward_kinematics(self.model, q)
        positions, _ = foot_terms(self.model, q, kin=kin)
        _, p_c = centroidal_matrix(self.model, q, kin=kin)
        lam = lam.reshape(N_LEGS, 2)
        arms = positions - p_c[[0, 2]]
        l_x = lam[:, 0].sum()
        l_z = lam[:, 1].sum() - self.model.mass * self.model.gravity
        k_y = float(np.sum(arms[:, 1] * lam[:, 0] - arms[:, 0] * lam[:, 1]))
        return np.array([l_x, l_z, k_y]), arms

    def _step_values(self, z, k):
        q_k, v_k = self.state_at(z, k)
        return (q_k, v_k, z[self.index(k, "q")], z[self.index(k, "v")], z[self.index(k, "lam")],
                self.step_dt(z, k))

    def momentum_rows(self, z, k):
        q_k, v_k, q_next, v_next, lam, dt = self._step_values(z, k)
        rates, _ = self.rates(q_k, lam)
        return self.momentum(q_next, v_next) - self.momentum(q_k, v_k) - dt * rates

    def equality(self, z):
        values = np.zeros(self.n_eq)
        for k in range(self.h):
            row = self._rows[k]
            dt = self.step_dt(z, k)
            values[row:row + N_MOMENTUM] = self.momentum_rows(z, k)
            values[row + N_MOMENTUM:row + N_MOMENTUM + self.n_d] = self.kinematic_rows(z, k, dt)
            contact = self.contact_rows(z, k)
            start = row + N_MOMENTUM + self.n_d
            values[start:start + contact.size] = contact
        return values

    def equality_jacobian(self, z):
        jac = np.zeros((self.n_eq, self.n))
        n_d = self.n_d
        for k in range(self.h):
            row = self._rows[k]
            rows = slice(row, row + N_MOMENTUM)
            q_k, v_k, q_next, v_next, lam, dt = self._step_values(z, k)
            a_next, _ = self.momentum_matrix(q_next)
            jac[rows, self.index(k, "v")] = a_next
            jac[rows, self.index(k, "q")] = numerical_jacobian(
                lambda x: self.momentum(x, v_next), q_next, self.fd_step)
            rates, arms = self.rates(q_k, lam)
            lam_jac = np.zeros((N_MOMENTUM, 2 * N_LEGS))
            for leg in range(N_LEGS):
                lam_jac[0, 2 * leg] = 1.0
                lam_jac[1, 2 * leg + 1] = 1.0
                lam_jac[2, 2 * leg] = arms[leg, 1]
                lam_jac[2, 2 * leg + 1] = -arms[leg, 0]
            jac[rows, self.index(k, "lam")] = -dt * lam_jac
            if self.dt_mode.optimize:
                jac[rows, self.dt_index(k)] -= rates
            if k > 0:
                a_k, _ = self.momentum_matrix(q_k)
                jac[rows, self.index(k - 1, "v")] = -a_k
                jac[rows, self.index(k - 1, "q")] = numerical_jacobian(
                    lambda x: -self.momentum(x, v_k) - dt * self.rates(x, lam)[0], q_k, self.fd_step)
            self.kinematic_jacobian(jac, row + N_MOMENTUM, z, k, dt)
            self.contact_jacobian(jac, row + N_MOMENTUM + n_d, z, k)
        return jac

    def residual(self, z):
        momentum = [self._sqrt_r1 * (self.momentum(z[self.index(k, "q")], z[self.index(k, "v")]) - self._h_ref[k])
                    for k in range(self.h)]
        return np.concatenate([self._linear_residual(z)] + momentum)

    def residual_jacobian(self, z):
        jac = np.zeros((self.n_steps + N_MOMENTUM * self.h, self.n))
        jac[:self.n_steps] = self._linear_residual_jacobian()
        for k in range(self.h):
            rows = slice(self.n_steps + N_MOMENTUM * k, self.n_steps + N_MOMENTUM * (k + 1))
            q_next, v_next = z[self.index(k, "q")], z[self.index(k, "v")]
            a_next, _ = self.momentum_matrix(q_next)
            jac[rows, self.index(k, "v")] = self._sqrt_r1[:, None] * a_next
            jac[rows, self.index(k, "q")] = self._sqrt_r1[:, None] * numerical_jacobian(
                lambda x: self.momentum(x, v_next), q_next, self.fd_step)
        return jac

    def momentum_residual(self, z):
        """Infinity norm of the gap between the mapped and the propagated momentum"""
        return float(max(np.max(np.abs(self.momentum_rows(z, k))) for k in range(self.h)))


def solve_explicit_kd(state, refs, schedule, weights=None, dt_mode=None, model=None, options=None, qp_settings=None,
                      settings=None, z_warm=None):
    """Planar explicit kino-dynamic NMPC over the horizon of ``refs``.

       Same conventions as ``solve_wb_mpc``; the result carries no torques
       and its ``dynamics_residual`` is the momentum-map residual.
    """
    t_start = time.perf_counter()
    if model is None:
        model = load_model("biped2d")
    if settings is None:
        settings = BaselineSettings.from_config()
    if weights is None:
        weights = KdWeights.from_config()
    if dt_mode is None:
        dt_mode = DtMode.fixed(refs.dt)
    if options is None:
        options = SqpOptions.from_config(max_iter=settings.sqp_max_iter)
    nlp = KinoDynamicNlp(model, state, refs, schedule, dt_mode, weights, mu=settings.mu, f_max=settings.f_max)
    z0 = nlp.initial_guess() if z_warm is None else np.clip(z_warm, nlp.lb, nlp.ub)
    sqp = solve_sqp(nlp, z0, options=options, qp_settings=qp_settings)
    q, qd, forces, dt = nlp.trajectories(sqp.z)
    result = BaselineResult("explicit_kd", q, qd, None, forces, dt, sqp, nlp.momentum_residual(sqp.z),
                            nlp.friction_violation(sqp.z), time.perf_counter() - t_start, nlp.h_swing, z=sqp.z)
    if result.flagged:
        LOG.warning("kino-dynamic NMPC %s after %d iterations (violation %.2e)", sqp.status.value, sqp.iterations,
                    sqp.violation)
    LOG.debug("%r", result)
    return result

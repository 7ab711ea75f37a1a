"""
Whole-body dynamics terms.

    M(q) qdd + C(q, qd) = S tau + sum_i J_i^T lambda_i

Planar models are reduced to their active coordinates (x, z, pitch and
the joints); every returned matrix is expressed on ``model.dofs``.
"""

import logging

import numpy as np
import scipy.linalg

from ..errors import SingularContactError
from ..kinematics import (
    forward_kinematics,
    motion_recursion,
    point_bias_acceleration,
    point_jacobian,
)
from ..utils import cross3

__all__ = [
    "DynamicsTerms",
    "dynamics_terms",
    "contact_constraint",
    "constrained_forward_dynamics",
    "kinetic_energy",
    "potential_energy",
]

LOG = logging.getLogger(__name__)


class DynamicsTerms(object):
    """Mass matrix, bias vector and actuation selection on ``dofs``"""

    def __init__(self, M, C, S, dofs):
        self.M = M
        self.C = C
        self.S = S
        self.dofs = dofs


def dynamics_terms(model, q, qd, kin=None):
    """Mass matrix accumulated body by body from the link Jacobians
       (M = sum m Jv^T Jv + Jw^T I Jw) and the bias vector as inverse
       dynamics at zero acceleration.
    """
    q, qd = model.check_state(q, qd)
    if kin is None:
        kin = forward_kinematics(model, q)
    motion = motion_recursion(kin, qd)
    gravity = np.array([0.0, 0.0, -model.gravity])
    dofs = model.dofs
    mass_matrix = np.zeros((model.nq, model.nq))
    bias = np.zeros(model.nq)
    for index, link in enumerate(model.links):
        com = kin.link_coms[index]
        jac = point_jacobian(kin, index, com)
        j_lin, j_ang = jac[0:3], jac[3:6]
        rot = kin.link_rotations[index]
        inertia = rot @ link.inertia @ rot.T
        mass_matrix += link.mass * (j_lin.T @ j_lin) + j_ang.T @ inertia @ j_ang
        accel, alpha = point_bias_acceleration(kin, motion, index, com)
        omega = motion.omega[link.joint]
        bias += j_lin.T @ (link.mass * (accel - gravity))
        bias += j_ang.T @ (inertia @ alpha + cross3(omega, inertia @ omega))
    mass_matrix = mass_matrix[np.ix_(dofs, dofs)]
    mass_matrix = 0.5 * (mass_matrix + mass_matrix.T)
    selection = np.zeros((dofs.size, model.n_j))
    selection[dofs.size - model.n_j:, :] = np.eye(model.n_j)
    return DynamicsTerms(mass_matrix, bias[dofs], selection, dofs)


def contact_constraint(model, kin, qd, contact_ids):
    """Stacked translational contact Jacobian on ``model.dofs`` and the
       matching Jdot*qd drift; planar models keep the x and z rows"""
    rows = (0, 2) if model.planar else (0, 1, 2)
    motion = motion_recursion(kin, qd)
    jacobians = []
    drifts = []
    for contact_id in contact_ids:
        index = model.contact_index(contact_id)
        contact = model.contacts[index]
        jac = point_jacobian(kin, contact.link, kin.contacts[index])
        accel, _ = point_bias_acceleration(kin, motion, contact.link, kin.contacts[index])
        jacobians.append(jac[np.ix_(rows, model.dofs)])
        drifts.append(accel[list(rows)])
    if not jacobians:
        return np.zeros((0, model.dofs.size)), np.zeros(0), rows
    return np.vstack(jacobians), np.concatenate(drifts), rows


def constrained_forward_dynamics(model, q, qd, tau_j, active_contacts=()):
    """Solves the contact KKT system

           [ M   -J^T ] [qdd   ]   [ -C + S tau ]
           [ -J   0   ] [lambda] = [ Jdot qd    ]

       Returns
       -------
       (array, array)
           qdd over all nq coordinates, and one 3-D force per active contact

       Raises
       ------
       SingularContactError
           if the active contact rows are linearly dependent
    """
    q, qd = model.check_state(q, qd)
    kin = forward_kinematics(model, q)
    terms = dynamics_terms(model, q, qd, kin=kin)
    rhs_dyn = -terms.C + terms.S @ np.asarray(tau_j, dtype=float)
    qdd = np.zeros(model.nq)
    active_contacts = list(active_contacts)
    if not active_contacts:
        qdd[terms.dofs] = scipy.linalg.solve(terms.M, rhs_dyn, assume_a='pos')
        return qdd, np.zeros((0, 3))
    jac, drift, rows = contact_constraint(model, kin, qd, active_contacts)
    n_rows = jac.shape[0]
    if np.linalg.matrix_rank(jac) < n_rows:
        raise SingularContactError("contact set {!r} is rank deficient".format(active_contacts))
    n_dofs = terms.dofs.size
    kkt = np.zeros((n_dofs + n_rows, n_dofs + n_rows))
    kkt[:n_dofs, :n_dofs] = terms.M
    kkt[:n_dofs, n_dofs:] = -jac.T
    kkt[n_dofs:, :n_dofs] = -jac
    solution = scipy.linalg.solve(kkt, np.concatenate([rhs_dyn, drift]))
    qdd[terms.dofs] = solution[:n_dofs]
    forces = np.zeros((len(active_contacts), 3))
    forces[:, list(rows)] = solution[n_dofs:].reshape(len(active_contacts), len(rows))
    return qdd, forces


def kinetic_energy(model, q, qd):
    terms = dynamics_terms(model, q, qd)
    v = np.asarray(qd, dtype=float)[terms.dofs]
    return 0.5 * v @ terms.M @ v


def potential_energy(model, q):
    kin = forward_kinematics(model, q)
    return model.gravity * sum(link.mass * com[2] for link, com in zip(model.links, kin.link_coms))

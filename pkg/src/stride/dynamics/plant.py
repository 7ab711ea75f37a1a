"""
Compliant-contact physics plant.

Semi-implicit Euler at a fixed 1 ms step. Each contact point meets the
terrain through a one-sided spring-damper along z and a regularized
Coulomb law along x (and y for spatial models).
"""

import logging

import numpy as np
import scipy.linalg

from ..config import get_config_section, register_config
from ..errors import PlantDivergedError
from ..kinematics import forward_kinematics, point_jacobian
from .terms import dynamics_terms

__all__ = [
    "PlantParams",
    "PlantState",
    "Plant",
    "contact_force",
    "simulate_step",
]

LOG = logging.getLogger(__name__)

register_config(
    name="plant",
    default={
        "stiffness": 1.0e5,
        "damping": 1.0e3,
        "mu": 0.7,
        "slip_velocity": 0.01,
        "dt": 0.001,
        "max_velocity": 1.0e3,
    })


class PlantParams(object):
    def __init__(self, stiffness=1.0e5, damping=1.0e3, mu=0.7, slip_velocity=0.01, dt=0.001,
                 max_velocity=1.0e3):
        self.stiffness = stiffness
        self.damping = damping
        self.mu = mu
        self.slip_velocity = slip_velocity
        self.dt = dt
        self.max_velocity = max_velocity

    @classmethod
    def from_config(cls, config=None):
        return cls(**get_config_section("plant", config))


class PlantState(object):
    """Generalized state, contact flags and forces per contact, time"""

    def __init__(self, q, qd, t=0.0, in_contact=None, forces=None):
        self.q = np.asarray(q, dtype=float)
        self.qd = np.asarray(qd, dtype=float)
        self.t = float(t)
        self.in_contact = in_contact
        self.forces = forces

    def copy(self):
        return type(self)(self.q.copy(), self.qd.copy(), self.t, self.in_contact,
                          None if self.forces is None else self.forces.copy())

    def __repr__(self):
        return "{}(t={!r}, q={!r})".format(type(self).__name__, self.t, self.q.tolist())


def contact_force(params, terrain_height, position, velocity, planar=True):
    """Force on a contact point from the ground model.

       Returns a zero force in gaps (``terrain_height`` None) and above
       ground; the normal component is never negative.
    """
    force = np.zeros(3)
    if terrain_height is None:
        return force
    penetration = terrain_height - position[2]
    if penetration <= 0.0:
        return force
    normal = params.stiffness * penetration - params.damping * velocity[2]
    if normal <= 0.0:
        return force
    force[2] = normal
    if planar:
        force[0] = -params.mu * normal * np.tanh(velocity[0] / params.slip_velocity)
    else:
        slip = np.hypot(velocity[0], velocity[1])
        if slip > 0.0:
            scale = -params.mu * normal * np.tanh(slip / params.slip_velocity) / slip
            force[0] = scale * velocity[0]
            force[1] = scale * velocity[1]
    return force


class Plant(object):
    """Owns the (possibly payload-modified) model the physics runs on"""

    def __init__(self, model, params=None, payload=0.0):
        if params is None:
            params = PlantParams.from_config()
        if payload:
            model = model.with_payload(payload)
        self.model = model
        self.params = params

    def initial_state(self, q, qd=None):
        if qd is None:
            qd = np.zeros(self.model.nq)
        return PlantState(q, qd, 0.0,
                          in_contact=tuple(False for _ in self.model.contacts),
                          forces=np.zeros((len(self.model.contacts), 3)))

    def step(self, state, tau_j, terrain, dt_sim=None, external_force=None):
        return simulate_step(self, state, tau_j, terrain, dt_sim=dt_sim, external_force=external_force)


def simulate_step(plant, state, tau_j, terrain, dt_sim=None, external_force=None):
    """Advances ``state`` by one step.

       Parameters
       ----------
       plant: Plant
       state: PlantState
       tau_j: array
           joint torques, saturated at the model limits
       terrain: Terrain
       dt_sim: float
           step (default from the plant parameters, 1 ms)
       external_force: array, optional
           world force applied at the torso CoM

       Raises
       ------
       PlantDivergedError
           on non-finite or runaway states
    """
    model = plant.model
    params = plant.params
    if dt_sim is None:
        dt_sim = params.dt
    q, qd = state.q, state.qd
    kin = forward_kinematics(model, q)
    terms = dynamics_terms(model, q, qd, kin=kin)
    limits = model.torque_limits()
    tau = np.clip(np.asarray(tau_j, dtype=float), -limits, limits)
    gen_force = -terms.C + terms.S @ tau
    dofs = terms.dofs
    forces = np.zeros((len(model.contacts), 3))
    in_contact = []
    for index, contact in enumerate(model.contacts):
        position = kin.contacts[index]
        jac = point_jacobian(kin, contact.link, position)
        velocity = jac[0:3] @ qd
        force = contact_force(params, terrain.height_at(position[0]), position, velocity, planar=model.planar)
        forces[index] = force
        in_contact.append(bool(force[2] > 0.0))
        if force[2] > 0.0:
            gen_force += jac[0:3, dofs].T @ force
    if external_force is not None:
        jac = point_jacobian(kin, 0, kin.link_coms[0])
        gen_force += jac[0:3, dofs].T @ np.asarray(external_force, dtype=float)
    qdd = scipy.linalg.cho_solve(scipy.linalg.cho_factor(terms.M), gen_force)
    qd_next = qd.copy()
    q_next = q.copy()
    qd_next[dofs] = qd[dofs] + dt_sim * qdd
    q_next[dofs] = q[dofs] + dt_sim * qd_next[dofs]
    if not (np.all(np.isfinite(q_next)) and np.all(np.isfinite(qd_next))) \
            or np.max(np.abs(qd_next)) > params.max_velocity:
        raise PlantDivergedError("plant diverged at t={:.4f}".format(state.t), state=state)
    return PlantState(q_next, qd_next, state.t + dt_sim, in_contact=tuple(in_contact), forces=forces)

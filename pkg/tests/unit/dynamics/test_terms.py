import copy

import numpy as np

from stride.dynamics import (
    Plant,
    PlantParams,
    constrained_forward_dynamics,
    contact_constraint,
    dynamics_terms,
    kinetic_energy,
    potential_energy,
)
from stride.errors import SingularContactError
from stride.kinematics import forward_kinematics, load_model
from stride.terrain import Terrain
from stride.utils import numerical_jacobian

import pytest


@pytest.fixture(scope="module", params=["biped2d", "leg3d"])
def model(request):
    return load_model(request.param)


@pytest.fixture(scope="module")
def biped():
    return load_model("biped2d")


def _configuration(model, seed=0):
    rng = np.random.default_rng(seed)
    q = np.zeros(model.nq)
    q[2] = 0.4
    q[model.dofs] += rng.uniform(-0.2, 0.2, size=model.dofs.size)
    return q


def _velocity(model, seed=1):
    rng = np.random.default_rng(seed)
    qd = np.zeros(model.nq)
    qd[model.dofs] = rng.uniform(-1.0, 1.0, size=model.dofs.size)
    return qd


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_mass_matrix_spd(model, seed):
    q = _configuration(model, seed)
    terms = dynamics_terms(model, q, np.zeros(model.nq))
    assert terms.M.shape == (model.dofs.size, model.dofs.size)
    assert np.allclose(terms.M, terms.M.T)
    assert np.all(np.linalg.eigvalsh(terms.M) > 0.0)
    assert terms.S.shape == (model.dofs.size, model.n_j)


def test_free_fall(model):
    q = _configuration(model)
    qdd, forces = constrained_forward_dynamics(model, q, np.zeros(model.nq), np.zeros(model.n_j))
    expected = np.zeros(model.nq)
    expected[2] = -model.gravity
    assert np.allclose(qdd, expected, atol=1e-8)
    assert forces.shape == (0, 3)


def test_gravity_is_potential_gradient(biped):
    q = _configuration(biped)
    dofs = biped.dofs
    terms = dynamics_terms(biped, q, np.zeros(biped.nq))

    def energy(x):
        full = q.copy()
        full[dofs] = x
        return potential_energy(biped, full)

    gradient = numerical_jacobian(energy, q[dofs])[0]
    assert np.allclose(terms.C, gradient, atol=1e-5)


@pytest.mark.parametrize("seed", [3, 4])
def test_energy_rate_matches_joint_power(biped, seed):
    q = _configuration(biped, seed)
    qd = _velocity(biped, seed)
    tau = np.random.default_rng(seed).uniform(-2.0, 2.0, size=biped.n_j)
    qdd, _ = constrained_forward_dynamics(biped, q, qd, tau)

    def energy(eps):
        return kinetic_energy(biped, q + eps * qd, qd + eps * qdd) + potential_energy(biped, q + eps * qd)

    eps = 1e-6
    rate = (energy(eps) - energy(-eps)) / (2.0 * eps)
    power = tau @ qd[biped.dofs][-biped.n_j:]
    assert rate == pytest.approx(power, abs=1e-4)


def test_contact_acceleration_vanishes(model):
    q = _configuration(model)
    qd = _velocity(model)
    contacts = [leg.contact for leg in model.legs]
    tau = np.ones(model.n_j)
    qdd, forces = constrained_forward_dynamics(model, q, qd, tau, active_contacts=contacts)
    jac, drift, rows = contact_constraint(model, forward_kinematics(model, q), qd, contacts)
    assert np.allclose(jac @ qdd[model.dofs] + drift, 0.0, atol=1e-8)
    assert forces.shape == (2, 3)
    if model.planar:
        assert np.allclose(forces[:, 1], 0.0)


def test_single_contact_force_balance(biped):
    q = _configuration(biped)
    contact = biped.legs[0].contact
    qdd, forces = constrained_forward_dynamics(biped, q, np.zeros(biped.nq), np.zeros(biped.n_j),
                                               active_contacts=[contact])
    assert forces.shape == (1, 3)
    assert np.all(np.isfinite(qdd))


def test_duplicated_contact_is_singular(model):
    q = _configuration(model)
    contact = model.legs[0].contact
    with pytest.raises(SingularContactError):
        constrained_forward_dynamics(model, q, np.zeros(model.nq), np.zeros(model.n_j),
                                     active_contacts=[contact, contact])


def test_kinetic_energy_at_rest(model):
    q = _configuration(model)
    assert kinetic_energy(model, q, np.zeros(model.nq)) == 0.0


def test_potential_energy_translation(model):
    q = _configuration(model)
    lifted = q.copy()
    lifted[2] += 0.1
    assert potential_energy(model, lifted) - potential_energy(model, q) == pytest.approx(
        model.mass * model.gravity * 0.1)


def _newton_euler(model, q, qd, qdd):
    """Generalized forces from link-wise Newton-Euler balances with gravity as a base acceleration"""
    kin = forward_kinematics(model, q)
    n_joints = len(model.joints)
    omega = np.zeros((n_joints, 3))
    alpha = np.zeros((n_joints, 3))
    accel = np.zeros((n_joints, 3))
    for index, joint in enumerate(model.joints):
        if joint.parent < 0:
            w_p, al_p, a_p, o_p = np.zeros(3), np.zeros(3), np.array([0.0, 0.0, model.gravity]), kin.origins[index]
        else:
            parent = joint.parent
            w_p, al_p, a_p, o_p = omega[parent], alpha[parent], accel[parent], kin.origins[parent]
        axis = kin.axes[index]
        lever = kin.origins[index] - o_p
        a = a_p + np.cross(al_p, lever) + np.cross(w_p, np.cross(w_p, lever))
        rate, rate_dot = qd[joint.q_index], qdd[joint.q_index]
        if joint.kind == "prismatic":
            omega[index] = w_p
            alpha[index] = al_p
            accel[index] = a + 2.0 * np.cross(w_p, axis * rate) + axis * rate_dot
        else:
            omega[index] = w_p + axis * rate
            alpha[index] = al_p + np.cross(w_p, axis * rate) + axis * rate_dot
            accel[index] = a
    tau = np.zeros(model.nq)
    for index, link in enumerate(model.links):
        joint = link.joint
        lever = kin.link_coms[index] - kin.origins[joint]
        w = omega[joint]
        a_com = accel[joint] + np.cross(alpha[joint], lever) + np.cross(w, np.cross(w, lever))
        rotation = kin.link_rotations[index]
        inertia = rotation @ link.inertia @ rotation.T
        force = link.mass * a_com
        moment = inertia @ alpha[joint] + np.cross(w, inertia @ w)
        for support in model.support[index]:
            axis = kin.axes[support]
            q_index = model.joints[support].q_index
            if model.revolute[support]:
                arm = kin.link_coms[index] - kin.origins[support]
                tau[q_index] += axis @ (moment + np.cross(arm, force))
            else:
                tau[q_index] += axis @ force
    return tau


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_terms_match_newton_euler(model, seed):
    q = _configuration(model, seed)
    qd = _velocity(model, seed + 5)
    qdd = _velocity(model, seed + 9) * 3.0
    terms = dynamics_terms(model, q, qd)
    expected = _newton_euler(model, q, qd, qdd)[terms.dofs]
    assert np.allclose(terms.M @ qdd[terms.dofs] + terms.C, expected, atol=1e-9)


@pytest.mark.slow
def test_passive_swing_conserves_energy(biped):
    weightless = copy.copy(biped)
    weightless.gravity = 0.0
    plant = Plant(weightless, PlantParams())
    q = _configuration(biped, 4)
    q[2] = 5.0
    qd = np.zeros(biped.nq)
    qd[[6, 7, 8, 9]] = [0.8, -0.6, -0.5, 0.7]
    state = plant.initial_state(q, qd)
    energy = kinetic_energy(weightless, q, qd)
    terrain = Terrain.flat()
    for _ in range(1000):
        state = plant.step(state, np.zeros(biped.n_j), terrain)
    assert state.t == pytest.approx(1.0)
    assert kinetic_energy(weightless, state.q, state.qd) == pytest.approx(energy, rel=1e-3)

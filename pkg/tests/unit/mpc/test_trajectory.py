import numpy as np

from stride.centroidal import ContactSchedule
from stride.mpc import STEP_SIZE, ControlTrajectory, SearchDirections, SolverTolerances, foot_groups

import pytest


def test_initial_guess(biped, bundle, schedule):
    u = ControlTrajectory.initial_guess(bundle, biped.mass)
    weight = biped.mass * 9.81
    assert u.h == 10
    for k in range(u.h):
        assert np.isclose(u.forces[k, :, 2].sum(), weight)
        for leg in range(2):
            if not schedule.stance(leg, k):
                assert np.allclose(u.forces[k, leg], 0.0)
    assert np.allclose(u.moments, 0.0)
    assert np.allclose(u.feet, bundle.p_f_ref)
    assert np.allclose(u.com, bundle.p_c_ref[:10])


def test_double_support_split(biped, bundle):
    schedule = ContactSchedule.standing_schedule(h=10)
    u = ControlTrajectory.initial_guess(bundle.replace(schedule=schedule), biped.mass)
    assert np.allclose(u.forces[:, :, 2], biped.mass * 9.81 / 2.0)


@pytest.mark.parametrize("leg, groups", [
    (0, [(list(range(10)), False)]),
    (1, [(list(range(5)), True), (list(range(5, 10)), False)]),
])
def test_foot_groups(schedule, leg, groups):
    assert foot_groups(schedule, leg) == groups


def test_foot_groups_mid_step():
    schedule = ContactSchedule.walking(h=10, h_swing=5, swing_leg=0, phase=2)
    assert foot_groups(schedule, 0) == [(list(range(0, 8)), False), (list(range(8, 10)), False)]
    assert foot_groups(schedule, 1) == [(list(range(0, 3)), True), (list(range(3, 10)), False)]


def test_foot_groups_standing():
    schedule = ContactSchedule.standing_schedule(h=6)
    assert foot_groups(schedule, 0) == [(list(range(6)), True)]


def test_shifted(biped, bundle):
    u = ControlTrajectory.initial_guess(bundle, biped.mass)
    u.com[:, 0] = np.arange(10.0)
    shifted = u.shifted(3)
    assert shifted.com[:, 0].tolist() == [3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 9.0, 9.0, 9.0]
    assert u.com[0, 0] == 0.0
    assert np.allclose(u.shifted(0).com, u.com)


def test_apply(biped, bundle):
    u = ControlTrajectory.initial_guess(bundle, biped.mass)
    steps = np.ones((10, STEP_SIZE))
    moved = u.apply(SearchDirections.from_steps(steps))
    assert np.allclose(moved.forces, u.forces + 1.0)
    assert np.allclose(moved.com, u.com + 1.0)


def test_conform(biped, bundle, schedule):
    u = ControlTrajectory.initial_guess(bundle, biped.mass)
    u.forces[:] = -1.0
    u.feet[:, 0, 0] = np.arange(10.0)
    conformed = u.conform(bundle, biped.mass)
    for k in range(10):
        for leg in range(2):
            if schedule.stance(leg, k):
                assert conformed.forces[k, leg, 2] > 0.0
            else:
                assert np.allclose(conformed.forces[k, leg], 0.0)
    # the swinging left foot shares the value of the first column of its group
    assert np.allclose(conformed.feet[:, 0, 0], 0.0)
    assert np.allclose(conformed.feet[:5, 1], bundle.feet0[1])
    assert np.allclose(conformed.com[0], bundle.p_c_ref[0])


def test_next_targets(biped, bundle, schedule):
    u = ControlTrajectory.initial_guess(bundle, biped.mass)
    targets = u.next_targets(schedule)
    assert np.allclose(targets[0], u.feet[0, 0])
    assert np.allclose(targets[1], u.feet[5, 1])


def test_steps_layout():
    steps = np.arange(2 * STEP_SIZE, dtype=float).reshape(2, STEP_SIZE)
    directions = SearchDirections.from_steps(steps)
    assert directions.h == 2
    assert directions.forces[0, 1].tolist() == [9.0, 10.0, 11.0]
    assert directions.feet[0, 0].tolist() == [6.0, 7.0, 8.0]
    assert directions.com[1].tolist() == [39.0, 40.0, 41.0]
    assert np.allclose(directions.as_steps(), steps)


def test_scaled_norm():
    directions = SearchDirections.zeros(3)
    tolerances = SolverTolerances(eta_pos=1e-3, eta_f=1e-1, eta_tau=1e-2)
    assert directions.scaled_norm(tolerances) == 0.0
    directions.forces[1, 0, 2] = 0.05
    directions.com[2, 0] = -2e-3
    assert directions.norms() == (2e-3, 0.05, 0.0)
    assert directions.scaled_norm(tolerances) == pytest.approx(2.0)

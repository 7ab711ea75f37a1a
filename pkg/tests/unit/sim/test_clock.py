import numpy as np

from stride.kinematics import load_model
from stride.sim import GaitClock, SolveRecord, make_controller
from stride.sim.controllers import ExplicitKdVariableDtController, FixedDtController, PlanSolution, WholeBodyController

import pytest


def test_gait_clock_alternates():
    clock = GaitClock(5)
    assert not clock.started
    assert clock.next_swing_leg == 0
    clock.start(0.0, 0.05)
    assert clock.swing_leg == 0
    assert clock.index == 0
    assert clock.duration == pytest.approx(0.25)
    assert clock.next_swing_leg == 1
    clock.start(0.25, 0.04)
    assert clock.swing_leg == 1
    assert clock.index == 1
    assert clock.duration == pytest.approx(0.2)


@pytest.mark.parametrize("t, phase, column, finished", [
    (0.0, 0.0, 0, False),
    (0.1, 0.4, 2, False),
    (0.125, 0.5, 2, False),
    (0.2499, 0.9996, 4, False),
    (0.25, 1.0, 4, True),
    (0.4, 1.0, 4, True),
])
def test_gait_clock_phase(t, phase, column, finished):
    clock = GaitClock(5)
    clock.start(0.0, 0.05)
    assert clock.phase(t) == pytest.approx(phase)
    assert clock.column(t) == column
    assert clock.finished(t) == finished


def test_solve_record_row():
    record = SolveRecord(0.5, "proposed", "mid_step", 2, 2, True, False, 0.045, 0.003, np.arange(6.0),
                         np.full(6, np.nan))
    row = record.as_row()
    assert row["converged"] == 1
    assert row["fallback"] == 0
    assert row["h_meas_5"] == 5.0
    assert np.isnan(row["h_pred_0"])
    assert set(SolveRecord.FIELDS) <= set(row)


@pytest.mark.parametrize("name, controller_class", [
    ("fixed_dt", FixedDtController),
    ("wb", WholeBodyController),
    ("explicit_kd_dt", ExplicitKdVariableDtController),
])
def test_make_controller(name, controller_class):
    controller = make_controller(name, load_model("biped2d"), config={})
    assert isinstance(controller, controller_class)
    assert controller.name == name
    assert controller.gaitnet is None
    assert controller.replan_period == pytest.approx(0.01)
    schedule = controller.schedule()
    assert schedule.h == controller.params.h


def test_make_controller_unknown():
    with pytest.raises(ValueError):
        make_controller("pid", load_model("biped2d"), config={})


@pytest.mark.parametrize("t, expected", [
    (1.0, 0.0),
    (1.025, 0.5),
    (1.05, 1.0),
    (1.1, 2.0),
    (1.5, 3.0),
    (0.9, 0.0),
])
def test_planned_joints_interpolated(t, expected):
    controller = make_controller("wb", load_model("biped2d"), config={})
    columns = np.arange(4.0)[:, None] * np.ones((1, 4))
    controller.solution = PlanSolution(0.05, np.zeros((3, 2, 3)), np.zeros((3, 2, 3)), np.zeros((2, 3)), None,
                                       joints=columns, joint_rates=2.0 * columns)
    controller.solve_time = 1.0
    joints, joint_rates = controller._planned_joints(t)
    assert np.allclose(joints, expected)
    assert np.allclose(joint_rates, 2.0 * expected)

"""
Closed-loop controllers.

Every controller keeps a gait clock: a stride lasts ``h_swing`` columns
of the sampling time chosen at its start and the swing leg alternates
between strides. The footstep-start solve fixes the stride's dt; between
starts the plan is re-solved at ``replan_rate`` with that dt and the
swing curve is re-fit toward the new landing target.

Controllers are looked up by name in the ``controllers`` config section,
which maps a name to a ``'pkg.mdl:Class'`` reference.
"""

import logging

import numpy as np

from ..baselines import BaselineSettings, DtMode, solve_explicit_kd, solve_wb_mpc
from ..centroidal import ContactSchedule, SwingTrajectory, build_reference, clearance_apex
from ..config import get_config_section, register_config
from ..errors import MpcError, StrideError
from ..kinematics import forward_kinematics, joints_to_momenta
from ..modules import load_ref
from ..mpc import MpcParams, SolverContext
from ..profiler import Profiler
from ..qp import SqpOptions
from .lowlevel import ControlGains, ControlPlan, low_level_control

__all__ = [
    "GaitClock",
    "SolveRecord",
    "StrideRecord",
    "PlanSolution",
    "Controller",
    "ProposedController",
    "FixedDtController",
    "ExplicitKdController",
    "ExplicitKdVariableDtController",
    "WholeBodyController",
    "make_controller",
]

LOG = logging.getLogger(__name__)

register_config(
    name="controllers",
    default={
        "proposed": "stride.sim.controllers:ProposedController",
        "fixed_dt": "stride.sim.controllers:FixedDtController",
        "explicit_kd": "stride.sim.controllers:ExplicitKdController",
        "explicit_kd_dt": "stride.sim.controllers:ExplicitKdVariableDtController",
        "wb": "stride.sim.controllers:WholeBodyController",
    })


class GaitClock(object):
    def __init__(self, h_swing, swing_leg=0):
        self.h_swing = int(h_swing)
        self.swing_leg = int(swing_leg)
        self.index = -1
        self.t_start = None
        self.dt = None

    @property
    def started(self):
        return self.t_start is not None

    @property
    def duration(self):
        return self.h_swing * self.dt

    @property
    def next_swing_leg(self):
        return 1 - self.swing_leg if self.started else self.swing_leg

    def start(self, t, dt):
        self.swing_leg = self.next_swing_leg
        self.index += 1
        self.t_start = float(t)
        self.dt = float(dt)

    def elapsed(self, t):
        return t - self.t_start

    def phase(self, t):
        return min(1.0, max(0.0, self.elapsed(t) / self.duration))

    def column(self, t):
        return min(self.h_swing - 1, max(0, int(np.floor(self.elapsed(t) / self.dt + 1e-9))))

    def finished(self, t):
        return self.elapsed(t) >= self.duration - 1e-9


class SolveRecord(object):
    """One MPC solve as seen by the log.

       ``h_measured`` is the centroidal momentum at solve time,
       ``h_predicted`` the solver's prediction for one sampling time later
       (NaN when the controller does not predict it).
    """

    FIELDS = ("t", "controller", "mode", "iterations", "qp_count", "converged", "fallback", "dt", "wall_time")

    def __init__(self, t, controller, mode, iterations, qp_count, converged, fallback, dt, wall_time,
                 h_measured, h_predicted):
        self.t = t
        self.controller = controller
        self.mode = mode
        self.iterations = iterations
        self.qp_count = qp_count
        self.converged = bool(converged)
        self.fallback = bool(fallback)
        self.dt = dt
        self.wall_time = wall_time
        self.h_measured = np.asarray(h_measured, dtype=float)
        self.h_predicted = np.asarray(h_predicted, dtype=float)

    def as_row(self):
        row = {key: getattr(self, key) for key in self.FIELDS}
        row["converged"] = int(self.converged)
        row["fallback"] = int(self.fallback)
        for index in range(6):
            row["h_meas_{}".format(index)] = self.h_measured[index]
            row["h_pred_{}".format(index)] = self.h_predicted[index]
        return row


class StrideRecord(object):
    """A stride as planned at its start; placement is filled in when it ends"""

    def __init__(self, index, t_start, dt, swing_leg, liftoff, target, q, qd, targets):
        self.index = index
        self.t_start = t_start
        self.dt = dt
        self.swing_leg = swing_leg
        self.liftoff = np.asarray(liftoff, dtype=float)
        self.target = np.asarray(target, dtype=float)
        self.q = np.array(q, dtype=float)
        self.qd = np.array(qd, dtype=float)
        self.targets = np.asarray(targets, dtype=float)
        self.placed = None
        self.margin = None


class PlanSolution(object):
    """Per-column wrenches of a solve, the landing targets and the stride dt.

       Whole-body plans also carry per-column joint torques ``tau`` and the
       planned joint positions and velocities (h+1, n_j).
    """

    def __init__(self, dt, forces, moments, targets, record, tau=None, joints=None, joint_rates=None):
        self.dt = float(dt)
        self.forces = np.asarray(forces, dtype=float)
        self.moments = np.asarray(moments, dtype=float)
        self.targets = np.asarray(targets, dtype=float)
        self.record = record
        self.tau = None if tau is None else np.asarray(tau, dtype=float)
        self.joints = None if joints is None else np.asarray(joints, dtype=float)
        self.joint_rates = None if joint_rates is None else np.asarray(joint_rates, dtype=float)

    @property
    def h(self):
        return self.forces.shape[0]


class Controller(object):
    """Gait clock, replanning cadence and the low-level mapping.

       Subclasses implement ``solve_start`` and ``solve_mid``.
    """

    name = None

    def __init__(self, model, gaitnet=None, params=None, gains=None, profiler=None, config=None):
        if params is None:
            params = MpcParams.from_config(config, model=model)
        if gains is None:
            gains = ControlGains.from_config(config)
        if profiler is None:
            profiler = Profiler()
        control = get_config_section("control", config)
        self.model = model
        self.gaitnet = gaitnet
        self.params = params
        self.gains = gains
        self.profiler = profiler
        self.replan_period = 1.0 / float(control["replan_rate"])
        self.apex = float(control["apex"])
        self.dt_policy = None
        self.clock = GaitClock(params.h_swing)
        self.solution = None
        self.swing = None
        self.solve_column = 0
        self.solve_time = None
        self.next_replan = None
        self.solves = []
        self.strides = []
        self.events = []

    def reset(self):
        self.clock = GaitClock(self.params.h_swing)
        self.solution = None
        self.swing = None
        self.solve_column = 0
        self.solve_time = None
        self.next_replan = None
        self.solves = []
        self.strides = []
        self.events = []

    def schedule(self, t=None, swing_leg=None):
        """Contact schedule seen from time ``t`` (a fresh stride when ``t`` is None)"""
        if swing_leg is None:
            swing_leg = self.clock.swing_leg
        phase = 0 if t is None else self.clock.column(t)
        return ContactSchedule.walking(h=self.params.h, h_swing=self.params.h_swing, swing_leg=swing_leg,
                                       phase=phase)

    def event(self, t, kind, detail=""):
        LOG.info("t=%.3f %s %s", t, kind, detail)
        self.events.append((t, kind, detail))

    def foot_positions(self, q):
        kin = forward_kinematics(self.model, q)
        return np.array([kin.contact_position(leg.contact) for leg in self.model.legs])

    def measured_momentum(self, state):
        return joints_to_momenta(self.model, state.q, state.qd).h

    def control(self, t, state, command, terrain):
        """Joint torques at time ``t``; solves when a stride starts or a replan is due"""
        if not self.clock.started or self.clock.finished(t):
            self.start_stride(t, state, command, terrain)
        elif t >= self.next_replan - 1e-9:
            self.replan(t, state, command, terrain)
        return low_level_control(self.model, state, self.current_plan(t), self.clock.phase(t), self.gains)

    def start_stride(self, t, state, command, terrain):
        swing_leg = self.clock.next_swing_leg
        dt_forced = None
        if self.dt_policy is not None:
            dt_forced = self.dt_policy(self.clock.index + 1, t, state)
        schedule = self.schedule(swing_leg=swing_leg)
        try:
            solution = self.solve_start(t, state, command, terrain, schedule, dt_forced)
        except MpcError as err:
            self.event(t, "solver_failure", str(err))
            raise
        self.clock.start(t, solution.dt)
        liftoff = self.foot_positions(state.q)[swing_leg]
        target = solution.targets[swing_leg]
        self.swing = SwingTrajectory(liftoff, target, clearance_apex(self.apex, liftoff[-1], target[-1]))
        self.solution = solution
        self.solve_column = 0
        self.solve_time = t
        self.next_replan = t + self.replan_period
        self.solves.append(solution.record)
        self.strides.append(StrideRecord(self.clock.index, t, solution.dt, swing_leg, liftoff, target,
                                         state.q, state.qd, solution.targets))
        LOG.debug("stride %d: leg %d, dt %.4f, target %s", self.clock.index, swing_leg, solution.dt, target)

    def replan(self, t, state, command, terrain):
        column = self.clock.column(t)
        schedule = self.schedule(t)
        self.next_replan = t + self.replan_period
        try:
            solution = self.solve_mid(t, state, command, terrain, schedule, column)
        except (MpcError, StrideError) as err:
            LOG.warning("t=%.3f mid-step solve failed, keeping the previous plan: %s", t, err)
            self.event(t, "solver_failure", str(err))
            return
        self.solution = solution
        self.solve_column = column
        self.solve_time = t
        self.solves.append(solution.record)
        target = solution.targets[self.clock.swing_leg]
        if np.max(np.abs(target - self.swing.target)) > 1e-9:
            self.swing = self.swing.retarget(target, self.clock.phase(t))
            self.strides[-1].target = np.asarray(target, dtype=float)

    def current_plan(self, t):
        k = min(self.solution.h - 1, max(0, self.clock.column(t) - self.solve_column))
        stance = [leg != self.clock.swing_leg for leg in range(len(self.model.legs))]
        solution = self.solution
        tau = None if solution.tau is None else solution.tau[k]
        joints = joint_rates = None
        if solution.joints is not None:
            joints, joint_rates = self._planned_joints(t)
        return ControlPlan(stance, solution.forces[k], solution.moments[k],
                           swings={self.clock.swing_leg: self.swing}, duration=self.clock.duration, feedforward=tau,
                           joints=joints, joint_rates=joint_rates)

    def _planned_joints(self, t):
        """Planned joint positions and velocities, linearly interpolated at ``t``"""
        solution = self.solution
        s = max(0.0, (t - self.solve_time) / solution.dt)
        k = min(int(np.floor(s)), solution.joints.shape[0] - 2)
        alpha = min(1.0, s - k)
        joints = (1.0 - alpha) * solution.joints[k] + alpha * solution.joints[k + 1]
        joint_rates = None
        if solution.joint_rates is not None:
            joint_rates = (1.0 - alpha) * solution.joint_rates[k] + alpha * solution.joint_rates[k + 1]
        return joints, joint_rates

    def solve_start(self, t, state, command, terrain, schedule, dt_forced):
        raise NotImplementedError

    def solve_mid(self, t, state, command, terrain, schedule, column):
        raise NotImplementedError


class ProposedController(Controller):
    """Sequential convex centroidal MPC; the step-duration predictor sets each stride's dt"""

    name = "proposed"

    def __init__(self, model, gaitnet=None, params=None, gains=None, profiler=None, config=None):
        super().__init__(model, gaitnet=gaitnet, params=params, gains=gains, profiler=profiler, config=config)
        self.context = SolverContext(model, params=self.params, gaitnet=gaitnet, profiler=self.profiler)
        self.result = None

    def _solution(self, t, state, result, schedule):
        diagnostics = result.diagnostics
        h_predicted = np.full(6, np.nan)
        if result.prediction is not None:
            h_predicted = result.prediction[1][6:12]
        record = SolveRecord(t, self.name, diagnostics.mode, diagnostics.iterations, diagnostics.qp_count,
                             diagnostics.converged, diagnostics.fallback, result.dt, diagnostics.wall_time,
                             self.measured_momentum(state), h_predicted)
        self.result = result
        return PlanSolution(result.dt, result.u.forces, result.u.moments, result.u.next_targets(schedule), record)

    def solve_start(self, t, state, command, terrain, schedule, dt_forced):
        self.context.time = t
        if dt_forced is not None:
            result = self.context.mid_step_solve(state, command, terrain, dt_forced, None, schedule=schedule)
        else:
            result = self.context.sequential_solve(state, command, terrain, schedule=schedule)
        return self._solution(t, state, result, schedule)

    def solve_mid(self, t, state, command, terrain, schedule, column):
        self.context.time = t
        result = self.context.mid_step_solve(state, command, terrain, self.clock.dt, self.result, schedule=schedule,
                                             elapsed=column - self.solve_column)
        return self._solution(t, state, result, schedule)


class FixedDtController(ProposedController):
    """The same MPC held at the nominal sampling time"""

    name = "fixed_dt"

    def __init__(self, model, gaitnet=None, params=None, gains=None, profiler=None, config=None):
        super().__init__(model, gaitnet=None, params=params, gains=gains, profiler=profiler, config=config)


class BaselineController(Controller):
    """Runs one of the planar baseline NMPCs on the shared references"""

    solver = None
    optimize_dt = False

    def __init__(self, model, gaitnet=None, params=None, gains=None, profiler=None, config=None):
        super().__init__(model, gaitnet=gaitnet, params=params, gains=gains, profiler=profiler, config=config)
        self.settings = BaselineSettings.from_config(config)
        self.options = SqpOptions.from_config(config, max_iter=self.settings.closed_loop_max_iter)

    def _solve(self, t, state, command, terrain, schedule, dt, dt_mode, mode):
        params = self.params
        bundle = build_reference(state, command, schedule, dt, terrain, self.model, com_height=params.com_height,
                                 max_ref_accel=params.max_ref_accel, apex=params.apex,
                                 placement_margin=params.placement_margin, clamp=True)
        result = type(self).solver(state, bundle, schedule, dt_mode=dt_mode, model=self.model, options=self.options,
                                   settings=self.settings)
        self.profiler["baseline.{}".format(self.name)].add_timing(result.wall_time)
        dt_stride = float(result.dt[0])
        record = SolveRecord(t, self.name, mode, result.sqp.iterations, result.sqp.qp_count, result.converged, False,
                             dt_stride, result.wall_time, self.measured_momentum(state), np.full(6, np.nan))
        moments = np.zeros_like(result.forces)
        actuated = self.model.actuated
        return PlanSolution(dt_stride, result.forces, moments, bundle.targets, record, tau=result.tau,
                            joints=result.q[:, actuated], joint_rates=result.qd[:, actuated])

    def solve_start(self, t, state, command, terrain, schedule, dt_forced):
        if dt_forced is not None:
            return self._solve(t, state, command, terrain, schedule, dt_forced, DtMode.random(value=dt_forced),
                               "sequential")
        if self.optimize_dt:
            low, high = self.settings.dt_bounds
            return self._solve(t, state, command, terrain, schedule, self.params.dt_nominal,
                               DtMode.optimized(bounds=(low, high), initial=self.params.dt_nominal), "sequential")
        dt = self.params.dt_nominal
        return self._solve(t, state, command, terrain, schedule, dt, DtMode.fixed(dt), "sequential")

    def solve_mid(self, t, state, command, terrain, schedule, column):
        dt = self.clock.dt
        return self._solve(t, state, command, terrain, schedule, dt, DtMode.fixed(dt), "mid_step")


class ExplicitKdController(BaselineController):
    name = "explicit_kd"
    solver = staticmethod(solve_explicit_kd)


class ExplicitKdVariableDtController(ExplicitKdController):
    """Explicit kino-dynamic NMPC with the stride dt as a decision variable"""

    name = "explicit_kd_dt"
    optimize_dt = True


class WholeBodyController(BaselineController):
    name = "wb"
    solver = staticmethod(solve_wb_mpc)


def make_controller(name, model, gaitnet=None, config=None, profiler=None):
    """Instantiates the controller registered as ``name``"""
    registry = get_config_section("controllers", config)
    try:
        reference = registry[name]
    except KeyError:
        raise ValueError("unknown controller {!r} (known: {})".format(name, ", ".join(sorted(registry)))) from None
    controller_class = load_ref(reference)
    return controller_class(model, gaitnet=gaitnet, profiler=profiler, config=config)

"""
Step-duration-augmented sequential convex MPC.

Each iteration solves the convex subproblem for the search directions,
accumulates them into the total solution, asks the step-duration
predictor for a new sampling time and refreshes the references by leg IK
against the new foot and CoM solutions. The loop stops once every
search direction is below its tolerance.

When the step norms stall, the sampling time is frozen at its nominal
value and the iterations go on as plain sequential convexification.
"""

import csv
import logging
import os
import time

import numpy as np

from ..centroidal import ContactSchedule, build_reference, update_reference_from_solution
from ..errors import MpcError, OutOfReachError
from ..kinematics import joints_to_momenta
from ..profiler import Profiler
from ..qp import QpSettings, solve_qp
from .bounds import foot_bounds, relax_bounds
from .params import MpcParams
from .subproblem import assemble_subproblem
from .trajectory import N_LEGS, ControlTrajectory

__all__ = [
    "MpcDiagnostics",
    "MpcResult",
    "SolverContext",
    "sequential_solve",
    "mid_step_solve",
    "DIAGNOSTIC_FIELDS",
]

LOG = logging.getLogger(__name__)

DIAGNOSTIC_FIELDS = ("time", "mode", "iterations", "qp_count", "converged", "fallback", "relaxed",
                     "dt_final", "wall_time", "bound_violation")


class MpcDiagnostics(object):
    def __init__(self, mode):
        self.mode = mode
        self.iterations = 0
        self.qp_count = 0
        self.step_norms = []
        self.dt_history = []
        self.converged = False
        self.fallback = False
        self.fallback_iteration = None
        self.relaxed = False
        self.bound_violation = False
        self.reach_clamped = False
        self.dt_final = float("nan")
        self.wall_time = 0.0

    def monotone_after(self, start=2):
        """True if the step norms never grow from iteration ``start`` on"""
        norms = self.step_norms[start - 1:]
        return all(b <= a for a, b in zip(norms, norms[1:]))

    def as_row(self, t=None):
        return {
            "time": "" if t is None else t,
            "mode": self.mode,
            "iterations": self.iterations,
            "qp_count": self.qp_count,
            "converged": int(self.converged),
            "fallback": int(self.fallback),
            "relaxed": int(self.relaxed),
            "dt_final": self.dt_final,
            "wall_time": self.wall_time,
            "bound_violation": int(self.bound_violation),
        }

    def __repr__(self):
        return "{}(mode={!r}, iterations={!r}, qp_count={!r}, converged={!r}, fallback={!r}, dt_final={!r})".format(
            type(self).__name__, self.mode, self.iterations, self.qp_count, self.converged, self.fallback,
            self.dt_final)


class MpcResult(object):
    """Total solution, its sampling time and the references it was solved against.

       ``prediction`` holds the predicted centroidal states [H; h] of the
       last subproblem, shape (h + 1, 12).
    """

    def __init__(self, u, dt, bundle, diagnostics, prediction, schedule):
        self.u = u
        self.dt = dt
        self.bundle = bundle
        self.diagnostics = diagnostics
        self.prediction = prediction
        self.schedule = schedule

    @property
    def converged(self):
        return self.diagnostics.converged


def _stalled(norms, window):
    """True when none of the last `window` step norms decreased"""
    if window <= 0 or len(norms) <= window:
        return False
    recent = norms[-(window + 1):]
    return all(b >= a for a, b in zip(recent, recent[1:]))


class SolverContext(object):
    """Per-control-loop solver state: parameters, QP settings, predictor, timings"""

    def __init__(self, model, params=None, qp_settings=None, gaitnet=None, diagnostics_file=None, profiler=None):
        if params is None:
            params = MpcParams.from_config(model=model)
        if qp_settings is None:
            qp_settings = QpSettings.from_config()
        if profiler is None:
            profiler = Profiler()
        self.model = model
        self.params = params
        self.qp_settings = qp_settings
        self.gaitnet = gaitnet
        self.diagnostics_file = diagnostics_file or params.diagnostics_file
        self.profiler = profiler
        self.time = None

    def default_schedule(self):
        return ContactSchedule.walking(h=self.params.h, h_swing=self.params.h_swing)

    def sequential_solve(self, state, command, terrain, schedule=None, u_warm=None):
        """Footstep-start solve: the predictor picks the sampling time"""
        return self._solve(state, command, terrain, schedule, self.params.dt_nominal, u_warm,
                           use_gaitnet=self.gaitnet is not None, mode="sequential")

    def mid_step_solve(self, state, command, terrain, dt_fixed, u_warm, schedule=None, elapsed=0):
        """Re-solve inside a footstep with the sampling time of its start.

           ``u_warm`` is a ControlTrajectory or the MpcResult of an earlier
           solve; ``elapsed`` horizon columns have passed since it was computed.
        """
        if dt_fixed <= 0.0:
            raise ValueError("dt_fixed must be positive, got {!r}".format(dt_fixed))
        velocity_profile = None
        if isinstance(u_warm, MpcResult):
            velocity_profile = u_warm.bundle.velocity[elapsed:]
            u_warm = u_warm.u
        if u_warm is not None:
            u_warm = u_warm.shifted(elapsed)
        return self._solve(state, command, terrain, schedule, dt_fixed, u_warm, use_gaitnet=False,
                           mode="mid_step", velocity_profile=velocity_profile)

    def _reference(self, state, command, schedule, dt, terrain, velocity_profile):
        params = self.params
        return build_reference(state, command, schedule, dt, terrain, self.model, com_height=params.com_height,
                               max_ref_accel=params.max_ref_accel, apex=params.apex,
                               placement_margin=params.placement_margin, clamp=True,
                               velocity_profile=velocity_profile)

    def _update(self, bundle, u, dt, diagnostics):
        try:
            return update_reference_from_solution(bundle, u.feet, u.com, dt, self.model)
        except OutOfReachError as err:
            LOG.warning("reference update out of reach at step %s, clamping foot targets", err.step)
            diagnostics.reach_clamped = True
            return update_reference_from_solution(bundle, u.feet, u.com, dt, self.model, clamp=True)

    def _bounds(self, terrain, bundle, schedule, u, diagnostics):
        params = self.params
        result = []
        for leg in range(N_LEGS):
            window = schedule.next_window(leg)
            if window is None or max(window.start, 0) >= schedule.h:
                result.append(None)
                continue
            bounds = foot_bounds(terrain, bundle.p_c_ref[0], schedule, leg, target=u.feet[max(window.start, 0), leg],
                                 hip_offset=-bundle.com_offset, nominal=params.com_height - bundle.com_offset[2],
                                 reach_x=params.reach_x, reach_y=params.reach_y, reach_z=params.reach_z,
                                 margin=params.placement_margin)
            if bounds.violated:
                diagnostics.bound_violation = True
            result.append(bounds)
        return result

    def _assemble(self, bundle, x0, dt, u, schedule, bounds):
        params = self.params
        return assemble_subproblem(bundle, x0, dt, u, schedule, bounds, params.weights, wrench=params.wrench,
                                   mass=self.model.mass, gravity=self.model.gravity, planar=self.model.planar,
                                   share_foot_variables=params.share_foot_variables)

    def _solve(self, state, command, terrain, schedule, dt, u_warm, use_gaitnet, mode, velocity_profile=None):
        t_start = time.perf_counter()
        model = self.model
        params = self.params
        tolerances = params.tolerances
        if schedule is None:
            schedule = self.default_schedule()
        q, qd = model.check_state(state.q, state.qd)
        diagnostics = MpcDiagnostics(mode)
        x0 = joints_to_momenta(model, q, qd)
        bundle = self._reference(state, command, schedule, dt, terrain, velocity_profile)
        if u_warm is None:
            u = ControlTrajectory.initial_guess(bundle, model.mass, model.gravity)
        else:
            u = u_warm.conform(bundle, model.mass, model.gravity)
            bundle = self._update(bundle, u, dt, diagnostics)
        bounds = self._bounds(terrain, bundle, schedule, u, diagnostics)
        warm = None
        prediction = None
        for iteration in range(tolerances.j_max):
            subproblem = self._assemble(bundle, x0, dt, u, schedule, bounds)
            solution = solve_qp(subproblem.qp, warm_start=warm, settings=self.qp_settings)
            diagnostics.qp_count += 1
            if not solution.solved:
                if diagnostics.relaxed:
                    raise MpcError("subproblem {} at iteration {} with relaxed foot bounds".format(
                        solution.status.value, iteration), diagnostics=diagnostics)
                LOG.warning("subproblem %s at iteration %d, relaxing foot bounds", solution.status.value, iteration)
                diagnostics.relaxed = True
                bounds = [None if leg_bounds is None else relax_bounds(leg_bounds) for leg_bounds in bounds]
                subproblem = self._assemble(bundle, x0, dt, u, schedule, bounds)
                solution = solve_qp(subproblem.qp, settings=self.qp_settings)
                diagnostics.qp_count += 1
                if not solution.solved:
                    raise MpcError("subproblem {} at iteration {} after relaxing foot bounds".format(
                        solution.status.value, iteration), diagnostics=diagnostics)
            directions = subproblem.directions(solution.z)
            u = u.apply(directions)
            prediction = subproblem.predict(solution.z)
            norm = directions.scaled_norm(tolerances)
            diagnostics.step_norms.append(norm)
            diagnostics.iterations = iteration + 1
            LOG.debug("%s iteration %d: scaled step %.3e, dt %.4f", mode, iteration, norm, dt)
            if not diagnostics.fallback and _stalled(diagnostics.step_norms, params.fallback_window):
                diagnostics.fallback = True
                diagnostics.fallback_iteration = iteration
                LOG.info("step norms stalled at iteration %d, falling back to dt=%.3f", iteration, params.dt_nominal)
                if use_gaitnet:
                    dt = params.dt_nominal
            dt_next = dt
            if use_gaitnet and not diagnostics.fallback:
                dt_next = params.clip_dt(self.gaitnet.predict_dt(q, qd, u.next_targets(schedule)))
            bundle = self._update(bundle, u, dt_next, diagnostics)
            dt = dt_next
            diagnostics.dt_history.append(dt)
            warm = (np.zeros(subproblem.n), solution.y)
            if norm <= 1.0:
                diagnostics.converged = True
                break
        if not diagnostics.converged:
            LOG.warning("%s solve not converged after %d iterations (scaled step %.3e)", mode,
                        diagnostics.iterations, diagnostics.step_norms[-1])
        diagnostics.dt_final = dt
        diagnostics.wall_time = time.perf_counter() - t_start
        self.profiler["mpc.{}".format(mode)].add_timing(diagnostics.wall_time)
        self._write_diagnostics(diagnostics)
        return MpcResult(u, dt, bundle, diagnostics, prediction, schedule)

    def _write_diagnostics(self, diagnostics):
        if not self.diagnostics_file:
            return
        new_file = not os.path.exists(self.diagnostics_file)
        with open(self.diagnostics_file, "a", newline="") as fp:
            writer = csv.DictWriter(fp, fieldnames=DIAGNOSTIC_FIELDS)
            if new_file:
                writer.writeheader()
            writer.writerow(diagnostics.as_row(self.time))


def _context(model, params, weights, tols, gaitnet, context):
    if context is not None:
        if gaitnet is not None:
            context.gaitnet = gaitnet
        return context
    if model is None:
        raise ValueError("either a model or a solver context is required")
    if params is None:
        params = MpcParams.from_config(model=model)
    if weights is not None:
        params = params.replace(weights=weights)
    if tols is not None:
        params = params.replace(tolerances=tols)
    return SolverContext(model, params=params, gaitnet=gaitnet)


def sequential_solve(state, command, terrain, gaitnet=None, weights=None, tols=None, model=None, schedule=None,
                     params=None, context=None, u_warm=None):
    """Footstep-start sequential solve; fixed nominal dt without a predictor.

       Returns
       -------
       MpcResult

       Raises
       ------
       MpcError
           when the subproblem stays infeasible after relaxing the foot bounds
    """
    context = _context(model, params, weights, tols, gaitnet, context)
    return context.sequential_solve(state, command, terrain, schedule=schedule, u_warm=u_warm)


def mid_step_solve(state, command, terrain, dt_fixed, u_warm, weights=None, tols=None, model=None, schedule=None,
                   params=None, context=None, elapsed=0):
    """Sequential solve with the predictor bypassed and dt held at ``dt_fixed``"""
    context = _context(model, params, weights, tols, None, context)
    return context.mid_step_solve(state, command, terrain, dt_fixed, u_warm, schedule=schedule, elapsed=elapsed)

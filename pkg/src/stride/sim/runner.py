"""
Closed-loop simulation: controller at the replanning rate, plant at 1 kHz.
"""

import logging

import numpy as np

from ..centroidal import standing_configuration
from ..config import get_config_section
from ..dynamics import Plant, PlantParams
from ..errors import MpcError, PlantDivergedError
from ..kinematics import com_position, forward_kinematics, joints_to_momenta, load_model
from .controllers import make_controller
from .log import SimLog
from .metrics import compute_metrics

__all__ = [
    "initial_state",
    "run_scenario",
]

LOG = logging.getLogger(__name__)

# swing phases outside this window are liftoff or regular touchdown
EARLY_TOUCHDOWN_WINDOW = (0.2, 0.8)


def initial_state(plant, scenario, com_height):
    """Plant state standing still at ``scenario.start_x``"""
    model = plant.model
    x = scenario.start_x
    ground = scenario.terrain.height_at(x)
    feet = np.array([[x, leg.r_c1[1], ground] for leg in model.legs])
    q = standing_configuration(model, np.array([x, 0.0, ground + com_height]), feet)
    return plant.initial_state(q)


class _StrideBook(object):
    """Closes strides as the controller opens new ones"""

    def __init__(self, model, terrain, h_swing, callback):
        self.model = model
        self.terrain = terrain
        self.h_swing = h_swing
        self.callback = callback
        self.current = None

    def open(self, record, state, command):
        record.com_start = float(com_position(self.model, state.q)[0])
        record.command = command
        record.early_touchdown = False
        self.current = record

    def close(self, log, state, completed, fell=False):
        record = self.current
        if record is None:
            return
        self.current = None
        kin = forward_kinematics(self.model, state.q)
        leg = self.model.legs[record.swing_leg]
        placed = kin.contact_position(leg.contact)
        record.placed = placed
        record.margin = float(self.terrain.placement_margin(leg.side, placed[0]))
        record.com_end = float(com_position(self.model, state.q)[0])
        record.completed = bool(completed)
        log.add_stride({
            "index": record.index,
            "t_start": record.t_start,
            "swing_leg": record.swing_leg,
            "dt": record.dt,
            "duration": record.dt * self.h_swing,
            "command": record.command,
            "liftoff_x": record.liftoff[0],
            "target_x": record.target[0],
            "target_z": record.target[-1],
            "placed_x": placed[0],
            "placed_z": placed[-1],
            "margin": record.margin,
            "com_start": record.com_start,
            "com_end": record.com_end,
            "early_touchdown": int(record.early_touchdown),
            "completed": int(completed),
        })
        if self.callback is not None:
            self.callback(record, fell)


def run_scenario(scenario, controller=None, gaitnet=None, config=None, log_dir=None, dt_policy=None,
                 stride_callback=None, profiler=None):
    """Runs ``scenario`` in closed loop.

       Parameters
       ----------
       scenario: Scenario
       controller: str or Controller, optional
           registered controller name or instance (default from the scenario)
       gaitnet: object, optional
           step-duration predictor for the proposed controller
       config: dict, optional
       log_dir: str, optional
           directory the log files are written to
       dt_policy: callable, optional
           ``dt_policy(stride_index, t, state)`` forcing each stride's dt
       stride_callback: callable, optional
           ``stride_callback(stride_record, fell)`` called as a stride ends

       Returns
       -------
       SimLog
    """
    model = load_model(scenario.model)
    plant = Plant(model, PlantParams.from_config(config), payload=scenario.payload)
    if controller is None or isinstance(controller, str):
        controller = make_controller(controller or scenario.controller, model, gaitnet=gaitnet, config=config,
                                     profiler=profiler)
    controller.reset()
    controller.dt_policy = dt_policy
    control = get_config_section("control", config)
    fall_pitch = float(control["fall_pitch"])
    fall_height = float(control["fall_height"])
    log_every = max(1, int(control["log_every"]))

    terrain = scenario.terrain
    log = SimLog(scenario.name, controller.name, scenario.seed)
    state = initial_state(plant, scenario, controller.params.com_height)
    dt_sim = plant.params.dt
    n_ticks = int(round(scenario.duration / dt_sim))
    contact_index = [model.contact_index(leg.contact) for leg in model.legs]
    book = _StrideBook(plant.model, terrain, controller.params.h_swing, stride_callback)
    seen_solves = seen_events = seen_strides = 0
    LOG.info("running %r with controller %s", scenario, controller.name)

    t = 0.0
    for tick in range(n_ticks):
        t = tick * dt_sim
        command = scenario.command_at(t)
        failure = None
        try:
            tau = controller.control(t, state, command, terrain)
        except MpcError as err:
            failure = err
        for record in controller.solves[seen_solves:]:
            log.add_solve(record.as_row())
        for event_t, kind, detail in controller.events[seen_events:]:
            log.add_event(event_t, kind, detail)
        seen_solves, seen_events = len(controller.solves), len(controller.events)
        if failure is not None:
            LOG.error("t=%.3f solver failure: %s", t, failure)
            log.termination = "solver_failure"
            break
        for record in controller.strides[seen_strides:]:
            book.close(log, state, completed=True)
            book.open(record, state, command)
        seen_strides = len(controller.strides)

        try:
            state = plant.step(state, tau, terrain, dt_sim=dt_sim, external_force=scenario.external_force(t))
        except PlantDivergedError as err:
            log.add_event(t, "diverged", str(err))
            log.termination = "diverged"
            break

        stride = book.current
        if stride is not None and not stride.early_touchdown:
            low, high = EARLY_TOUCHDOWN_WINDOW
            phase = controller.clock.phase(state.t)
            if low < phase < high and state.in_contact[contact_index[stride.swing_leg]]:
                stride.early_touchdown = True
                LOG.warning("t=%.3f early touchdown of the %s foot", state.t, model.legs[stride.swing_leg].side)
                log.add_event(state.t, "early_touchdown", "stride {} phase {:.2f}".format(stride.index, phase))

        p_c = com_position(plant.model, state.q)
        ground = terrain.height_at(p_c[0])
        if abs(state.q[4]) > fall_pitch or p_c[2] - (0.0 if ground is None else ground) < fall_height:
            log.add_event(state.t, "fall", "pitch {:.3f} com height {:.3f}".format(state.q[4], p_c[2]))
            log.termination = "fall"
            break

        if tick % log_every == 0:
            momenta = joints_to_momenta(plant.model, state.q, state.qd)
            forces = np.zeros((2, 3)) if state.forces is None else state.forces
            log.add_tick({
                "t": state.t,
                "command": command,
                "com_x": p_c[0],
                "com_z": p_c[2],
                "com_vx": momenta.h[0] / plant.model.mass,
                "pitch": state.q[4],
                "contact_left": int(state.in_contact[contact_index[0]]),
                "contact_right": int(state.in_contact[contact_index[1]]),
                "force_left": forces[contact_index[0]][2],
                "force_right": forces[contact_index[1]][2],
            })

    log.t_end = float(state.t)
    book.close(log, state, completed=False, fell=log.fell)
    log.summary = compute_metrics(log, timing=False)
    LOG.info("%r finished at t=%.3f", log, log.t_end)
    if log_dir is not None:
        log.write(log_dir)
    return log

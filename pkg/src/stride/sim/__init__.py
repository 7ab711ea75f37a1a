"""
Closed-loop simulation harness
"""

from .scenario import (
    Disturbance,
    Scenario,
    load_scenario,
    gap_terrain,
    stepping_stones_terrain,
)
from .lowlevel import (
    ControlGains,
    ControlPlan,
    low_level_control,
    swing_joint_targets,
)
from .controllers import (
    GaitClock,
    SolveRecord,
    StrideRecord,
    Controller,
    ProposedController,
    FixedDtController,
    ExplicitKdController,
    ExplicitKdVariableDtController,
    WholeBodyController,
    make_controller,
)
from .log import (
    SimLog,
)
from .metrics import (
    compute_metrics,
    aggregate_metrics,
)
from .runner import (
    initial_state,
    run_scenario,
)

__all__ = [
    "Disturbance",
    "Scenario",
    "load_scenario",
    "gap_terrain",
    "stepping_stones_terrain",
    "ControlGains",
    "ControlPlan",
    "low_level_control",
    "swing_joint_targets",
    "GaitClock",
    "SolveRecord",
    "StrideRecord",
    "Controller",
    "ProposedController",
    "FixedDtController",
    "ExplicitKdController",
    "ExplicitKdVariableDtController",
    "WholeBodyController",
    "make_controller",
    "SimLog",
    "compute_metrics",
    "aggregate_metrics",
    "initial_state",
    "run_scenario",
]

"""
Centroidal model: exact dynamics, pose integration, schedules and references
"""

from .state import (
    CentroidalState,
    ContactConfig,
    centroidal_rates,
    cd_step_exact,
)
from .pose import (
    centroidal_pose_integrate,
)
from .schedule import (
    ContactSchedule,
    SwingWindow,
    LEGS,
)
from .swing import (
    SwingTrajectory,
    swing_trajectory,
    clearance_apex,
)
from .reference import (
    PlannedSwing,
    ReferenceBundle,
    build_reference,
    update_reference_from_solution,
    standing_configuration,
    check_command,
    landing_target,
)

__all__ = [
    "CentroidalState",
    "ContactConfig",
    "centroidal_rates",
    "cd_step_exact",
    "centroidal_pose_integrate",
    "ContactSchedule",
    "SwingWindow",
    "LEGS",
    "SwingTrajectory",
    "swing_trajectory",
    "clearance_apex",
    "PlannedSwing",
    "ReferenceBundle",
    "build_reference",
    "update_reference_from_solution",
    "standing_configuration",
    "check_command",
    "landing_target",
]

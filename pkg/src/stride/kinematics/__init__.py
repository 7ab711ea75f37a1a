"""
Robot model, kinematics and centroidal operators
"""

from .robot import (
    Link,
    Joint,
    Contact,
    LegGeometry,
    RobotModel,
    load_model,
    model_from_dict,
)
from .kinematics import (
    KinematicState,
    forward_kinematics,
    com_position,
    point_jacobian,
    link_jacobians,
    contact_jacobian,
    contact_positions,
    motion_recursion,
    point_bias_acceleration,
)
from .centroidal import (
    CentroidalQuantities,
    CentroidalState,
    centroidal_matrix,
    centroidal_momentum,
    joints_to_momenta,
)

__all__ = [
    "Link",
    "Joint",
    "Contact",
    "LegGeometry",
    "RobotModel",
    "load_model",
    "model_from_dict",
    "KinematicState",
    "forward_kinematics",
    "com_position",
    "point_jacobian",
    "link_jacobians",
    "contact_jacobian",
    "contact_positions",
    "motion_recursion",
    "point_bias_acceleration",
    "CentroidalQuantities",
    "CentroidalState",
    "centroidal_matrix",
    "centroidal_momentum",
    "joints_to_momenta",
]

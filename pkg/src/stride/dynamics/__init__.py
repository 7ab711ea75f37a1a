"""
Whole-body dynamics and the simulation plant
"""

from .terms import (
    DynamicsTerms,
    dynamics_terms,
    contact_constraint,
    constrained_forward_dynamics,
    kinetic_energy,
    potential_energy,
)
from .plant import (
    PlantParams,
    PlantState,
    Plant,
    contact_force,
    simulate_step,
)

__all__ = [
    "DynamicsTerms",
    "dynamics_terms",
    "contact_constraint",
    "constrained_forward_dynamics",
    "kinetic_energy",
    "potential_energy",
    "PlantParams",
    "PlantState",
    "Plant",
    "contact_force",
    "simulate_step",
]

"""
Comparison NMPCs on the planar biped
"""

from .params import (
    WbWeights,
    KdWeights,
    BaselineSettings,
)
from .transcription import (
    BaselineResult,
    DtMode,
    PlanarTranscription,
)
from .wholebody import (
    WholeBodyNlp,
    solve_wb_mpc,
)
from .kinodynamic import (
    KinoDynamicNlp,
    solve_explicit_kd,
)

__all__ = [
    "WbWeights",
    "KdWeights",
    "BaselineSettings",
    "BaselineResult",
    "DtMode",
    "PlanarTranscription",
    "WholeBodyNlp",
    "solve_wb_mpc",
    "KinoDynamicNlp",
    "solve_explicit_kd",
]

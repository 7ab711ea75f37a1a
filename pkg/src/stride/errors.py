"""
Errors
"""

__all__ = [
    "StrideError",
    "ModelError",
    "OutOfReachError",
    "SingularContactError",
    "PlantDivergedError",
    "QpInfeasibleError",
    "MpcError",
    "DatasetError",
    "TrainingError",
    "ScenarioError",
    "CommandError",
    "SimulationAborted",
]


class StrideError(Exception):
    pass


class ModelError(StrideError):
    pass


class OutOfReachError(StrideError):
    def __init__(self, message, quantity=None, value=None, step=None):
        super().__init__(message)
        self.quantity = quantity
        self.value = value
        self.step = step


class SingularContactError(StrideError):
    pass


class PlantDivergedError(StrideError):
    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class QpInfeasibleError(StrideError):
    pass


class MpcError(StrideError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class DatasetError(StrideError):
    pass


class TrainingError(StrideError):
    pass


class ScenarioError(StrideError):
    pass


class CommandError(StrideError, ValueError):
    pass


class SimulationAborted(StrideError):
    """A closed-loop run ended before its duration (fall, divergence, solver failure)"""

    def __init__(self, message, termination=None):
        super().__init__(message)
        self.termination = termination

"""
Main tool.
"""

import logging
import sys

from ..errors import (
    CommandError,
    DatasetError,
    ModelError,
    MpcError,
    PlantDivergedError,
    QpInfeasibleError,
    ScenarioError,
    SimulationAborted,
    StrideError,
    TrainingError,
)
from .display import Printer
from .main_argparse import main_argparse

__all__ = [
    'EXIT_SUCCESS',
    'EXIT_CODES',
    'exit_code',
    'main',
]

LOG = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# first match wins
EXIT_CODES = [
    (FileNotFoundError, 3, "missing_file"),
    ((ModelError, ScenarioError, DatasetError, CommandError), 4, "schema_violation"),
    ((MpcError, QpInfeasibleError, TrainingError), 5, "solver_failure"),
    ((PlantDivergedError, SimulationAborted), 6, "simulation_aborted"),
    (StrideError, 1, "error"),
]


def exit_code(exc):
    """(code, code name) for an exception escaping a subcommand"""
    if isinstance(exc, SimulationAborted) and exc.termination == "solver_failure":
        return 5, "solver_failure"
    for classes, code, name in EXIT_CODES:
        if isinstance(exc, classes):
            return code, name
    return EXIT_FAILURE, "error"


def main(argv=None):
    """Runs the tool; returns the process exit code"""
    try:
        main_argparse(argv)
    except SystemExit as exc:
        if exc.code in (None, 0):
            return EXIT_SUCCESS
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_FAILURE
    except Exception as exc:  # pylint: disable=broad-except
        code, name = exit_code(exc)
        LOG.debug("command failed", exc_info=True)
        message = " ".join(str(exc).split()) or type(exc).__name__
        Printer(colored=False, float_format="{}", file=sys.stderr).error(name, message)
        return code
    return EXIT_SUCCESS

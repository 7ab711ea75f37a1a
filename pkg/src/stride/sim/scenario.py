"""
Closed-loop scenarios.

A scenario JSON holds the terrain patches, the command velocity (a
constant or a list of [t, v] breakpoints held piecewise constant),
the CoM pushes, the payload and the controller to run:

    {
        "name": "gap10",
        "duration": 10.0,
        "command": [[0.0, 0.0], [1.0, 0.5]],
        "terrain": {"patches": [...]},
        "disturbances": [{"force": 50.0, "start": 4.0, "duration": 0.2}],
        "payload": 0.0,
        "controller": "proposed",
        "seed": 7
    }
"""

import json
import os

import numpy as np

from ..config import get_data_path
from ..errors import ScenarioError
from ..terrain import Patch, Terrain

__all__ = [
    "Disturbance",
    "Scenario",
    "load_scenario",
    "gap_terrain",
    "stepping_stones_terrain",
]


class Disturbance(object):
    """World force on the torso CoM, held for ``duration`` seconds"""

    def __init__(self, force, start, duration=0.2, direction=(1.0, 0.0, 0.0)):
        if duration <= 0.0:
            raise ScenarioError("disturbance duration must be positive, got {!r}".format(duration))
        self.force = float(force)
        self.start = float(start)
        self.duration = float(duration)
        direction = np.asarray(direction, dtype=float)
        self.direction = direction / np.linalg.norm(direction)

    def active(self, t):
        return self.start <= t < self.start + self.duration

    def force_vector(self):
        return self.force * self.direction

    def as_dict(self):
        return {"force": self.force, "start": self.start, "duration": self.duration,
                "direction": self.direction.tolist()}

    def __repr__(self):
        return "{}(force={!r}, start={!r}, duration={!r})".format(
            type(self).__name__, self.force, self.start, self.duration)


class Scenario(object):
    def __init__(self, name="scenario", terrain=None, command=0.0, disturbances=(), payload=0.0, duration=5.0,
                 controller="proposed", seed=7, model="biped2d", start_x=0.0):
        if duration <= 0.0:
            raise ScenarioError("{}: duration must be positive".format(name))
        if terrain is None:
            terrain = Terrain.flat()
        self.name = name
        self.terrain = terrain
        self.command = self._check_command(name, command)
        self.disturbances = sorted(disturbances, key=lambda d: d.start)
        self.payload = float(payload)
        self.duration = float(duration)
        self.controller = controller
        self.seed = int(seed)
        self.model = model
        self.start_x = float(start_x)
        if terrain.height_at(self.start_x) is None:
            raise ScenarioError("{}: no ground at the start position x={}".format(name, self.start_x))

    @staticmethod
    def _check_command(name, command):
        if isinstance(command, (int, float)):
            command = [[0.0, float(command)]]
        breakpoints = [(float(t), float(v)) for t, v in command]
        if not breakpoints:
            raise ScenarioError("{}: empty command profile".format(name))
        times = [t for t, _ in breakpoints]
        if times != sorted(times):
            raise ScenarioError("{}: command breakpoints out of order".format(name))
        for _, value in breakpoints:
            if abs(value) > 1.0:
                raise ScenarioError("{}: command {!r} outside [-1, 1] m/s".format(name, value))
        return breakpoints

    def command_at(self, t):
        value = self.command[0][1]
        for t_break, v_break in self.command:
            if t_break <= t:
                value = v_break
            else:
                break
        return value

    def external_force(self, t):
        force = np.zeros(3)
        for disturbance in self.disturbances:
            if disturbance.active(t):
                force += disturbance.force_vector()
        return force

    def replace(self, **kwargs):
        data = dict(self.__dict__)
        data.update(kwargs)
        return type(self)(**data)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        try:
            terrain = Terrain.from_dict(data.pop("terrain", {"patches": [{"x_start": -1000.0, "x_end": 1000.0}]}))
            disturbances = [Disturbance(**entry) for entry in data.pop("disturbances", [])]
            return cls(terrain=terrain, disturbances=disturbances, **data)
        except TypeError as err:
            raise ScenarioError("invalid scenario: {}".format(err)) from None

    def as_dict(self):
        return {
            "name": self.name,
            "duration": self.duration,
            "command": [list(entry) for entry in self.command],
            "terrain": self.terrain.as_dict(),
            "disturbances": [disturbance.as_dict() for disturbance in self.disturbances],
            "payload": self.payload,
            "controller": self.controller,
            "seed": self.seed,
            "model": self.model,
            "start_x": self.start_x,
        }

    def __repr__(self):
        return "{}(name={!r}, duration={!r}, controller={!r}, seed={!r})".format(
            type(self).__name__, self.name, self.duration, self.controller, self.seed)


def load_scenario(name_or_path):
    """Loads a scenario JSON; bare names resolve to the packaged scenarios"""
    if os.path.exists(name_or_path):
        filename = name_or_path
    else:
        filename = get_data_path("scenarios", name_or_path + ".json")
        if not os.path.exists(filename):
            raise FileNotFoundError("scenario {!r} not found".format(name_or_path))
    with open(filename, "r") as fp:
        try:
            data = json.load(fp)
        except ValueError as err:
            raise ScenarioError("{}: {}".format(filename, err)) from None
    data.setdefault("name", os.path.splitext(os.path.basename(filename))[0])
    return Scenario.from_dict(data)


def gap_terrain(gap_width, gap_start=1.0, n_gaps=3, spacing=0.8, virtual=False, extent=100.0):
    """Flat ground with ``n_gaps`` gaps of ``gap_width`` every ``spacing`` meters.

       Virtual gaps keep the ground but forbid footholds on it.
    """
    patches = []
    x = -extent
    for index in range(n_gaps):
        start = gap_start + index * spacing
        patches.append(Patch(x, start))
        if virtual:
            patches.append(Patch(start, start + gap_width, allowed_feet="none"))
        x = start + gap_width
    patches.append(Patch(x, extent))
    return Terrain(patches)


def stepping_stones_terrain(stones, extent=100.0):
    """Start and end platforms around ``stones``: (x_start, x_end, height, foot) entries"""
    stones = sorted(stones)
    patches = [Patch(-extent, stones[0][0])]
    for x_start, x_end, height, foot in stones:
        patches.append(Patch(x_start, x_end, height, allowed_feet=foot))
    patches.append(Patch(stones[-1][1], extent))
    return Terrain(patches)

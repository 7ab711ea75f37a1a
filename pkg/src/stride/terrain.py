"""
Discrete terrain.

A terrain is an ordered list of non-overlapping patches along x. Ground
exists only on patches; uncovered x ranges are real gaps. A patch whose
``allowed_feet`` is ``none`` is a virtual gap: it carries the robot but
no foot may be placed on it.
"""

import json

import numpy as np

from .errors import ScenarioError

__all__ = [
    "Patch",
    "Terrain",
    "load_terrain",
]

ALLOWED_FEET = ("both", "left", "right", "none")


class Patch(object):
    def __init__(self, x_start, x_end, height=0.0, allowed_feet="both"):
        if allowed_feet not in ALLOWED_FEET:
            raise ScenarioError("invalid allowed_feet {!r}".format(allowed_feet))
        if not x_end > x_start:
            raise ScenarioError("empty patch [{}, {}]".format(x_start, x_end))
        self.x_start = float(x_start)
        self.x_end = float(x_end)
        self.height = float(height)
        self.allowed_feet = allowed_feet

    def allows(self, leg):
        return self.allowed_feet == "both" or self.allowed_feet == leg

    def as_dict(self):
        return {"x_start": self.x_start, "x_end": self.x_end,
                "height": self.height, "allowed_feet": self.allowed_feet}

    def __repr__(self):
        return "{}({!r}, {!r}, height={!r}, allowed_feet={!r})".format(
            type(self).__name__, self.x_start, self.x_end, self.height, self.allowed_feet)


class Terrain(object):
    def __init__(self, patches):
        patches = sorted(patches, key=lambda p: p.x_start)
        for prev, curr in zip(patches, patches[1:]):
            if curr.x_start < prev.x_end:
                raise ScenarioError("overlapping patches {!r} and {!r}".format(prev, curr))
        self.patches = patches

    @classmethod
    def flat(cls, height=0.0, extent=1000.0):
        return cls([Patch(-extent, extent, height)])

    @classmethod
    def from_dict(cls, data):
        if isinstance(data, dict):
            data = data.get("patches", [])
        return cls([Patch(**entry) for entry in data])

    def as_dict(self):
        return {"patches": [patch.as_dict() for patch in self.patches]}

    def patch_at(self, x):
        for patch in self.patches:
            if patch.x_start <= x <= patch.x_end:
                return patch
        return None

    def height_at(self, x):
        """Ground height at ``x``; None inside a real gap"""
        patch = self.patch_at(x)
        if patch is None:
            return None
        return patch.height

    def allowed_intervals(self, leg, x_lo=-np.inf, x_hi=np.inf):
        """(a, b, height) segments of [x_lo, x_hi] where ``leg`` may step"""
        segments = []
        for patch in self.patches:
            if not patch.allows(leg):
                continue
            a = max(patch.x_start, x_lo)
            b = min(patch.x_end, x_hi)
            if b >= a:
                segments.append((a, b, patch.height))
        return segments

    def forbidden_intervals(self, leg):
        """x intervals where ``leg`` must not be placed: real gaps and
           patches the leg is not allowed on"""
        intervals = []
        previous_end = -np.inf
        for patch in self.patches:
            if patch.x_start > previous_end:
                intervals.append((previous_end, patch.x_start))
            if not patch.allows(leg):
                intervals.append((patch.x_start, patch.x_end))
            previous_end = patch.x_end
        intervals.append((previous_end, np.inf))
        return intervals

    def placement_margin(self, leg, x):
        """Signed distance from ``x`` to the nearest forbidden interval
           (negative when ``x`` lies inside one)"""
        margin = np.inf
        for a, b in self.forbidden_intervals(leg):
            if a < x < b:
                return -min(x - a, b - x)
            margin = min(margin, abs(x - a), abs(x - b))
        return margin


def load_terrain(filename):
    with open(filename, "r") as fp:
        return Terrain.from_dict(json.load(fp))

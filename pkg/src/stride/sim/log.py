"""
Closed-loop run logs.

A log directory holds ``ticks.csv`` (the downsampled plant state),
``events.csv``, ``strides.csv``, ``solves.csv`` and ``summary.json``.
Wall-clock times only appear in ``solves.csv``; everything else is a
function of the scenario and the seed.
"""

import csv
import json
import logging
import os

__all__ = [
    "TICK_FIELDS",
    "EVENT_FIELDS",
    "STRIDE_FIELDS",
    "SimLog",
]

LOG = logging.getLogger(__name__)

TICK_FIELDS = ("t", "command", "com_x", "com_z", "com_vx", "pitch", "contact_left", "contact_right",
               "force_left", "force_right")
EVENT_FIELDS = ("t", "kind", "detail")
STRIDE_FIELDS = ("index", "t_start", "swing_leg", "dt", "duration", "command", "liftoff_x", "target_x", "target_z",
                 "placed_x", "placed_z", "margin", "com_start", "com_end", "early_touchdown", "completed")

_TEXT_FIELDS = {"kind", "detail", "controller", "mode"}


def _write_csv(filename, fields, rows):
    with open(filename, "w", newline="") as fp:
        writer = csv.DictWriter(fp, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _parse(key, value):
    if key in _TEXT_FIELDS or value == "":
        return value
    try:
        return float(value)
    except ValueError:
        return value


def _read_csv(filename):
    if not os.path.exists(filename):
        return []
    with open(filename, "r", newline="") as fp:
        return [{key: _parse(key, value) for key, value in row.items()} for row in csv.DictReader(fp)]


class SimLog(object):
    def __init__(self, scenario="scenario", controller="proposed", seed=0):
        self.scenario = scenario
        self.controller = controller
        self.seed = seed
        self.ticks = []
        self.events = []
        self.strides = []
        self.solves = []
        self.termination = "completed"
        self.t_end = 0.0
        self.summary = {}

    def add_tick(self, row):
        self.ticks.append(row)

    def add_event(self, t, kind, detail=""):
        self.events.append({"t": t, "kind": kind, "detail": detail})

    def add_stride(self, row):
        self.strides.append(row)

    def add_solve(self, row):
        self.solves.append(row)

    @property
    def fell(self):
        return self.termination == "fall"

    def count_events(self, kind):
        return sum(1 for event in self.events if event["kind"] == kind)

    def solve_fields(self):
        if not self.solves:
            return ("t", "controller", "mode", "iterations", "qp_count", "converged", "fallback", "dt", "wall_time")
        return tuple(self.solves[0])

    def write(self, log_dir):
        os.makedirs(log_dir, exist_ok=True)
        _write_csv(os.path.join(log_dir, "ticks.csv"), TICK_FIELDS, self.ticks)
        _write_csv(os.path.join(log_dir, "events.csv"), EVENT_FIELDS, self.events)
        _write_csv(os.path.join(log_dir, "strides.csv"), STRIDE_FIELDS, self.strides)
        _write_csv(os.path.join(log_dir, "solves.csv"), self.solve_fields(), self.solves)
        summary = dict(self.summary)
        summary.update({
            "scenario": self.scenario,
            "controller": self.controller,
            "seed": self.seed,
            "termination": self.termination,
            "t_end": self.t_end,
        })
        with open(os.path.join(log_dir, "summary.json"), "w") as fp:
            json.dump(summary, fp, indent=4, sort_keys=True)
        LOG.info("log written to %s", log_dir)

    @classmethod
    def read(cls, log_dir):
        with open(os.path.join(log_dir, "summary.json"), "r") as fp:
            summary = json.load(fp)
        log = cls(summary.get("scenario"), summary.get("controller"), summary.get("seed"))
        log.termination = summary.get("termination", "completed")
        log.t_end = summary.get("t_end", 0.0)
        log.summary = summary
        log.ticks = _read_csv(os.path.join(log_dir, "ticks.csv"))
        log.events = _read_csv(os.path.join(log_dir, "events.csv"))
        log.strides = _read_csv(os.path.join(log_dir, "strides.csv"))
        log.solves = _read_csv(os.path.join(log_dir, "solves.csv"))
        return log

    def __repr__(self):
        return "{}(scenario={!r}, controller={!r}, seed={!r}, termination={!r})".format(
            type(self).__name__, self.scenario, self.controller, self.seed, self.termination)

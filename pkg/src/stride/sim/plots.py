"""
SVG figures of a run log
"""

import logging
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = [
    "plot_velocity",
    "plot_dt",
    "plot_footholds",
    "plot_momentum",
    "plot_log",
]

LOG = logging.getLogger(__name__)


def _column(rows, key):
    return np.array([row[key] for row in rows], dtype=float)


def _save(fig, filename):
    fig.tight_layout()
    fig.savefig(filename, format="svg")
    plt.close(fig)
    LOG.info("figure written to %s", filename)
    return filename


def plot_velocity(log, filename):
    fig, ax = plt.subplots(figsize=(7, 3))
    t = _column(log.ticks, "t")
    ax.plot(t, _column(log.ticks, "com_vx"), label="CoM velocity")
    ax.step(t, _column(log.ticks, "command"), where="post", linestyle="--", label="command")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("v [m/s]")
    ax.legend(loc="best")
    return _save(fig, filename)


def plot_dt(log, filename):
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(_column(log.strides, "t_start"), _column(log.strides, "dt"), marker="o")
    ax.set_xlabel("stride start [s]")
    ax.set_ylabel("dt [s]")
    return _save(fig, filename)


def plot_footholds(log, filename, terrain=None):
    """Planned against realized footholds; forbidden stretches shaded"""
    fig, ax = plt.subplots(figsize=(7, 3))
    index = _column(log.strides, "index")
    ax.plot(_column(log.strides, "target_x"), index, "x", label="target")
    ax.plot(_column(log.strides, "placed_x"), index, "o", fillstyle="none", label="placed")
    if terrain is not None and log.strides:
        x_lo, x_hi = ax.get_xlim()
        for side in ("left", "right"):
            for a, b in terrain.forbidden_intervals(side):
                ax.axvspan(max(a, x_lo), min(b, x_hi), color="grey", alpha=0.15)
        ax.set_xlim(x_lo, x_hi)
    ax.set_xlabel("x [m]")
    ax.set_ylabel("stride")
    ax.legend(loc="best")
    return _save(fig, filename)


def plot_momentum(log, filename, component=0):
    """Measured momentum against the value predicted one sampling time earlier"""
    rows = [row for row in log.solves if row.get("h_pred_{}".format(component), "") != ""]
    t = _column(rows, "t")
    measured = _column(rows, "h_meas_{}".format(component))
    predicted = _column(rows, "h_pred_{}".format(component))
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(t, measured, label="measured")
    ax.plot(t + _column(rows, "dt"), predicted, linestyle="--", label="predicted")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("h[{}]".format(component))
    ax.legend(loc="best")
    return _save(fig, filename)


def plot_log(log, output_dir, terrain=None):
    """All figures of ``log`` into ``output_dir``; returns the file names"""
    os.makedirs(output_dir, exist_ok=True)
    filenames = [
        plot_velocity(log, os.path.join(output_dir, "velocity.svg")),
        plot_dt(log, os.path.join(output_dir, "dt.svg")),
        plot_footholds(log, os.path.join(output_dir, "footholds.svg"), terrain=terrain),
    ]
    if log.solves and "h_meas_0" in log.solves[0]:
        filenames.append(plot_momentum(log, os.path.join(output_dir, "momentum.svg")))
    return filenames

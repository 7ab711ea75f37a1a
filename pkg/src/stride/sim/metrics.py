"""
Run metrics computed from a SimLog
"""

import collections

import numpy as np

__all__ = [
    "velocity_rmse",
    "solve_statistics",
    "placement_statistics",
    "compute_metrics",
    "aggregate_metrics",
]

SETTLE_TIME = 1.0


def _finite(value):
    value = float(value)
    return value if np.isfinite(value) else None


def velocity_rmse(log, settle_time=SETTLE_TIME):
    """RMS gap between the CoM velocity and the command after ``settle_time``"""
    errors = [row["com_vx"] - row["command"] for row in log.ticks if row["t"] >= settle_time]
    if not errors:
        return None
    return float(np.sqrt(np.mean(np.square(errors))))


def solve_statistics(log):
    """Per solve mode: count, mean/p50/p95 wall time, mean QP count, convergence and fallback rates"""
    groups = collections.defaultdict(list)
    for row in log.solves:
        groups[row["mode"]].append(row)
    stats = {}
    for mode, rows in groups.items():
        times = np.array([row["wall_time"] for row in rows], dtype=float)
        stats[mode] = {
            "count": len(rows),
            "mean_time": float(times.mean()),
            "p50_time": float(np.percentile(times, 50)),
            "p95_time": float(np.percentile(times, 95)),
            "mean_qp_count": float(np.mean([row["qp_count"] for row in rows])),
            "converged_rate": float(np.mean([row["converged"] for row in rows])),
            "fallback_rate": float(np.mean([row["fallback"] for row in rows])),
        }
    return stats


def placement_statistics(log):
    margins = np.array([row["margin"] for row in log.strides], dtype=float)
    if margins.size == 0:
        return {"min_margin": None, "violations": 0}
    return {
        "min_margin": _finite(margins.min()),
        "violations": int(np.sum(margins < 0.0)),
    }


def compute_metrics(log, timing=True):
    """Summary of a run; wall-clock figures go to ``solve_stats`` only when ``timing`` is set"""
    dts = np.array([row["dt"] for row in log.strides], dtype=float)
    metrics = {
        "velocity_rmse": velocity_rmse(log),
        "strides": len(log.strides),
        "dt_mean": float(dts.mean()) if dts.size else None,
        "dt_min": float(dts.min()) if dts.size else None,
        "dt_max": float(dts.max()) if dts.size else None,
        "falls": int(log.fell),
        "solver_failures": log.count_events("solver_failure"),
        "early_touchdowns": log.count_events("early_touchdown"),
        "fallbacks": int(sum(row["fallback"] for row in log.solves)),
        "solves": len(log.solves),
    }
    metrics.update(placement_statistics(log))
    if timing:
        metrics["solve_stats"] = solve_statistics(log)
    return metrics


def aggregate_metrics(runs):
    """Mean and rates over ``runs``: a list of metric mappings"""
    if not runs:
        return {}
    result = {"runs": len(runs), "fall_rate": float(np.mean([run["falls"] for run in runs]))}
    for key in ("velocity_rmse", "dt_mean", "min_margin"):
        values = [run[key] for run in runs if run.get(key) is not None]
        result[key] = float(np.mean(values)) if values else None
    result["violations"] = int(sum(run["violations"] for run in runs))
    result["fallbacks"] = int(sum(run["fallbacks"] for run in runs))
    return result

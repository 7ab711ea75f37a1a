import numpy as np

from stride.sim import SimLog, aggregate_metrics, compute_metrics
from stride.sim.metrics import placement_statistics, solve_statistics, velocity_rmse

import pytest


def _solve(mode, wall_time, qp_count, converged=1, fallback=0):
    return {"t": 0.0, "controller": "proposed", "mode": mode, "iterations": qp_count, "qp_count": qp_count,
            "converged": converged, "fallback": fallback, "dt": 0.05, "wall_time": wall_time}


@pytest.fixture
def log():
    log = SimLog("walk", "proposed", 7)
    for t, command, vx in ((0.5, 0.3, 0.0), (1.0, 0.3, 0.4), (2.0, 0.3, 0.2)):
        log.add_tick({"t": t, "command": command, "com_vx": vx})
    for dt, margin in ((0.05, 0.08), (0.04, -0.02), (0.06, 0.03)):
        log.add_stride({"dt": dt, "margin": margin})
    log.add_solve(_solve("sequential", 0.02, 4))
    log.add_solve(_solve("sequential", 0.04, 2, fallback=1))
    log.add_solve(_solve("mid_step", 0.01, 1, converged=0))
    log.add_event(3.0, "early_touchdown")
    return log


def test_velocity_rmse(log):
    assert velocity_rmse(log) == pytest.approx(0.1)
    assert velocity_rmse(log, settle_time=5.0) is None


def test_solve_statistics(log):
    stats = solve_statistics(log)
    assert sorted(stats) == ["mid_step", "sequential"]
    assert stats["sequential"]["count"] == 2
    assert stats["sequential"]["mean_time"] == pytest.approx(0.03)
    assert stats["sequential"]["mean_qp_count"] == 3.0
    assert stats["sequential"]["fallback_rate"] == 0.5
    assert stats["mid_step"]["converged_rate"] == 0.0


def test_placement_statistics(log):
    stats = placement_statistics(log)
    assert stats["min_margin"] == pytest.approx(-0.02)
    assert stats["violations"] == 1
    assert placement_statistics(SimLog()) == {"min_margin": None, "violations": 0}


def test_placement_infinite_margin():
    log = SimLog()
    log.add_stride({"dt": 0.05, "margin": np.inf})
    assert placement_statistics(log)["min_margin"] is None


@pytest.mark.parametrize("timing", [True, False])
def test_compute_metrics(log, timing):
    metrics = compute_metrics(log, timing=timing)
    assert metrics["strides"] == 3
    assert metrics["dt_mean"] == pytest.approx(0.05)
    assert metrics["dt_min"] == 0.04
    assert metrics["dt_max"] == 0.06
    assert metrics["falls"] == 0
    assert metrics["early_touchdowns"] == 1
    assert metrics["solver_failures"] == 0
    assert metrics["fallbacks"] == 1
    assert metrics["solves"] == 3
    assert ("solve_stats" in metrics) == timing


def test_compute_metrics_empty():
    metrics = compute_metrics(SimLog())
    assert metrics["velocity_rmse"] is None
    assert metrics["dt_mean"] is None
    assert metrics["strides"] == 0
    assert metrics["solve_stats"] == {}


def test_aggregate_metrics(log):
    fallen = SimLog("walk", "proposed", 8)
    fallen.termination = "fall"
    runs = [compute_metrics(log, timing=False), compute_metrics(fallen, timing=False)]
    result = aggregate_metrics(runs)
    assert result["runs"] == 2
    assert result["fall_rate"] == 0.5
    assert result["velocity_rmse"] == pytest.approx(0.1)
    assert result["dt_mean"] == pytest.approx(0.05)
    assert result["min_margin"] == pytest.approx(-0.02)
    assert result["violations"] == 1
    assert result["fallbacks"] == 1
    assert aggregate_metrics([]) == {}

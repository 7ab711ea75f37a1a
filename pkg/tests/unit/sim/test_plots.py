import os

from stride.sim import SimLog, gap_terrain
from stride.sim.plots import plot_log
from stride.sim.log import STRIDE_FIELDS

import pytest


@pytest.fixture
def log():
    log = SimLog("gap10", "proposed", 7)
    for index in range(20):
        t = 0.01 * index
        log.add_tick({"t": t, "command": 0.3, "com_vx": 0.25})
    for index in range(4):
        row = {key: 0.0 for key in STRIDE_FIELDS}
        row.update({"index": index, "t_start": 0.25 * index, "dt": 0.05, "target_x": 0.2 * index,
                    "placed_x": 0.2 * index + 0.01})
        log.add_stride(row)
    for index in range(5):
        row = {"t": 0.01 * index, "mode": "mid_step", "dt": 0.05}
        for component in range(6):
            row["h_meas_{}".format(component)] = 1.0
            row["h_pred_{}".format(component)] = 1.1
        log.add_solve(row)
    return log


def test_plot_log(log, tmp_path):
    filenames = plot_log(log, str(tmp_path / "figures"), terrain=gap_terrain(0.1))
    assert [os.path.basename(name) for name in filenames] == ["velocity.svg", "dt.svg", "footholds.svg",
                                                              "momentum.svg"]
    for name in filenames:
        with open(name, "r") as fp:
            assert "<svg" in fp.read()


def test_plot_log_without_momentum(log, tmp_path):
    log.solves = []
    filenames = plot_log(log, str(tmp_path))
    assert len(filenames) == 3

import math

from stride.profiler import Profiler, Timing

import pytest


def test_timing_statistics():
    timing = Timing()
    assert math.isnan(timing.average_time)
    assert math.isnan(timing.percentile(50))
    for elapsed in (0.1, 0.2, 0.3, 0.4):
        timing.add_timing(elapsed)
    assert timing.count == 4
    assert timing.average_time == pytest.approx(0.25)
    assert timing.percentile(50) == pytest.approx(0.25)
    assert timing.percentile(100) == pytest.approx(0.4)


def test_profiler_timeit():
    profiler = Profiler()
    for _ in range(3):
        with profiler.timeit("mpc.sequential"):
            pass
    assert profiler["mpc.sequential"].count == 3
    assert profiler["mpc.sequential"].total_time >= 0.0
    assert sorted(profiler) == ["mpc.sequential"]


def test_profiler_timeit_records_on_error():
    profiler = Profiler()
    with pytest.raises(RuntimeError):
        with profiler.timeit("qp"):
            raise RuntimeError("failed")
    assert profiler["qp"].count == 1

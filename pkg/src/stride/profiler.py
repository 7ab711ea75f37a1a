"""
Solve-time statistics
"""

import collections
import contextlib
import time

import numpy as np


__all__ = [
    "Timing",
    "Profiler",
]


class Timing(object):
    def __init__(self, count=0, total_time=0.0):
        self.count = count
        self.total_time = total_time
        self.samples = []

    def add_timing(self, elapsed):
        self.total_time += elapsed
        self.count += 1
        self.samples.append(elapsed)

    @property
    def average_time(self):
        if self.count == 0:
            return float('nan')
        return self.total_time / self.count

    def percentile(self, q):
        if not self.samples:
            return float('nan')
        return float(np.percentile(self.samples, q))

    def __repr__(self):
        return "{}(count={!r}, total_time={!r})".format(
            self.__class__.__name__,
            self.count, self.total_time)


class Profiler(collections.defaultdict):
    """Maps a label to its Timing"""

    def __init__(self):
        super().__init__(Timing)

    @contextlib.contextmanager
    def timeit(self, label):
        t_start = time.perf_counter()
        try:
            yield
        finally:
            self[label].add_timing(time.perf_counter() - t_start)

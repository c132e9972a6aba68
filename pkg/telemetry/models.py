import threading
import time
from contextlib import contextmanager

from django.db import models

REPORT_SCHEMA_VERSION = 1

# Counters every report lists, zero when never recorded
STANDARD_COUNTERS = (
    'labels_fw', 'labels_bw',
    'dominated_fw', 'dominated_bw',
    'evicted_fw', 'evicted_bw',
    'join_attempts', 'join_successes',
    'relaxation_iterations',
)


class ReportFormat(models.TextChoices):
    TEXT = 'text', 'Text'
    JSON = 'json', 'Json'


class Counters:
    """
    Named monotone counters and accumulated phase timers.

    Updates are serialized by a lock so both direction workers can record
    concurrently. When disabled every call returns after the flag check.
    """

    def __init__(self, enabled=True):
        self.enabled = enabled
        self.counters = {}
        self.timers = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f'Counters(enabled={self.enabled}, counters={self.counters})'

    def record(self, name, delta=1):
        if not self.enabled:
            return
        if delta < 0:
            raise ValueError(f'counter {name} cannot decrease')
        with self._lock:
            self.counters[name] = self.counters.get(name, 0) + delta

    def __getitem__(self, name):
        return self.counters.get(name, 0)

    @contextmanager
    def time_phase(self, name):
        """Add the wall-clock duration of the block to timer name."""
        if not self.enabled:
            yield
            return
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            with self._lock:
                self.timers[name] = self.timers.get(name, 0.0) + elapsed

    def snapshot(self):
        with self._lock:
            counters = {name: 0 for name in STANDARD_COUNTERS}
            counters.update(self.counters)
            return {'counters': counters, 'timers': dict(self.timers)}

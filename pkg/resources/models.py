from dataclasses import dataclass, field
import math

from django.db import models

from pathwise.exceptions import ResourceError

# Absolute tolerance for every feasibility comparison
TOLERANCE = 1e-9

# Marker returned by Resource.join when the combined value violates a bound
INFEASIBLE = None


class Direction(models.TextChoices):
    FORWARD = 'forward', 'Forward'
    BACKWARD = 'backward', 'Backward'


class ResourceKind(models.TextChoices):
    CAPACITY = 'capacity', 'Capacity'
    TIME = 'time', 'Time'
    NODE_LIMIT = 'nodelimit', 'Node limit'
    TIME_WINDOWS = 'timewindows', 'Time windows'
    CUSTOM = 'custom', 'Custom'


@dataclass
class ResourceData:
    """
    Bounds and consumption data of one resource.

    node_consumption has one entry per node. arc_consumption is an ArcMap
    stored like the graph, or None when arcs consume nothing. windows and
    service are only used by time based kinds.
    """

    lower_bound: float = 0.0
    upper_bound: float = math.inf
    node_consumption: list = field(default_factory=list)
    arc_consumption: object = None
    windows: list = None
    service: list = None

    def validate(self, n=None):
        if self.lower_bound > self.upper_bound:
            raise ResourceError(
                f'lower bound {self.lower_bound} exceeds upper bound {self.upper_bound}'
            )
        if n is not None and self.node_consumption and len(self.node_consumption) != n:
            raise ResourceError(f'expected {n} node consumptions, got {len(self.node_consumption)}')
        if self.windows is not None:
            for node, (open_, close) in enumerate(self.windows):
                if open_ > close:
                    raise ResourceError(f'window of node {node} opens at {open_} after closing at {close}')

    def node(self, i):
        return self.node_consumption[i] if self.node_consumption else 0.0

    def arc(self, i, j):
        if self.arc_consumption is None:
            return 0.0
        return self.arc_consumption.get(i, j)

    def service_time(self, i):
        return self.service[i] if self.service else 0.0

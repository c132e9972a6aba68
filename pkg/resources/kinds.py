"""
Resource behaviour: the four-method contract and the standard kinds.

A resource answers four questions for the labeling algorithm:

    init(origin, destination)          -> (forward value, backward value)
    extend(current, i, j, direction)   -> value after one more arc
    is_feasible(current, node, dir)    -> bound check of a partial path
    join(fw, bw, i, j)                 -> combined value or INFEASIBLE

Forward labels at i describe paths source..i and are extended along arc
(i, j). Backward labels at i describe paths i..destination and are extended
by pre-pending arc (j, i).
"""

from resources.models import INFEASIBLE, TOLERANCE, Direction, ResourceKind
from pathwise.exceptions import InfeasibleAtSource, ResourceError


class Resource:
    """
    Base class of every resource.

    Subclasses override the four contract methods. Custom resources set
    kind = ResourceKind.CUSTOM and may declare monotone = False, in which
    case they cannot be the critical resource.
    """

    kind = ResourceKind.CUSTOM
    monotone = True

    def __init__(self, data, name=None):
        self.data = data
        self.name = name or self.kind.label
        self.is_critical = False
        data.validate()

    def __repr__(self):
        return f'{self.__class__.__name__}(lb={self.data.lower_bound}, ub={self.data.upper_bound})'

    # Contract
    def init(self, origin, destination):
        raise NotImplementedError

    def extend(self, current, i, j, direction):
        raise NotImplementedError

    def is_feasible(self, current, node, direction, bounding=None):
        """
        Bound check of a partial path value.

        bounding is an optional remaining-budget hint for custom kinds;
        the standard kinds ignore it.
        """
        raise NotImplementedError

    def join(self, fw, bw, i, j):
        raise NotImplementedError

    # Helpers used by the solver
    def meets_lower_bound(self, total):
        """Lower bounds apply to complete paths only."""
        return total >= self.data.lower_bound - TOLERANCE

    def critical_bound(self):
        """U_c when this resource drives the half-way split."""
        return self.data.upper_bound

    def limit(self, node, direction):
        """Largest feasible value at node, used for unreachable-node bounds."""
        return self.data.upper_bound

    def increment_bound(self, i, j, direction):
        """Lower bound on extend(v, i, j, direction) - v."""
        return 0.0

    def _checked_init(self, origin, destination, forward, backward):
        if not self.is_feasible(forward, origin, Direction.FORWARD):
            raise InfeasibleAtSource(f'{self.name}: initial value {forward} infeasible at {origin}')
        if not self.is_feasible(backward, destination, Direction.BACKWARD):
            raise InfeasibleAtSource(f'{self.name}: initial value {backward} infeasible at {destination}')
        return forward, backward


class Capacity(Resource):
    """Load collected at nodes (demands) and optionally on arcs."""

    kind = ResourceKind.CAPACITY

    def init(self, origin, destination):
        return self._checked_init(origin, destination, self.data.node(origin), self.data.node(destination))

    def extend(self, current, i, j, direction):
        if direction == Direction.FORWARD:
            return current + self.data.arc(i, j) + self.data.node(j)
        return current + self.data.arc(j, i) + self.data.node(j)

    def is_feasible(self, current, node, direction, bounding=None):
        return current <= self.data.upper_bound + TOLERANCE

    def join(self, fw, bw, i, j):
        total = fw + self.data.arc(i, j) + bw
        if total > self.data.upper_bound + TOLERANCE:
            return INFEASIBLE
        return total

    def increment_bound(self, i, j, direction):
        if direction == Direction.FORWARD:
            return self.data.arc(i, j) + self.data.node(j)
        return self.data.arc(j, i) + self.data.node(j)


class NodeLimit(Resource):
    """Number of nodes on the path, both endpoints included."""

    kind = ResourceKind.NODE_LIMIT

    def init(self, origin, destination):
        return self._checked_init(origin, destination, 1.0, 1.0)

    def extend(self, current, i, j, direction):
        return current + 1.0

    def is_feasible(self, current, node, direction, bounding=None):
        return current <= self.data.upper_bound + TOLERANCE

    def join(self, fw, bw, i, j):
        total = fw + bw
        if total > self.data.upper_bound + TOLERANCE:
            return INFEASIBLE
        return total

    def increment_bound(self, i, j, direction):
        return 1.0


class Time(Resource):
    """
    Elapsed time without windows.

    Forward values are service start times measured from the origin;
    backward values are the time from the start of service at the label
    node to the start of service at the destination.
    """

    kind = ResourceKind.TIME

    def init(self, origin, destination):
        return self._checked_init(origin, destination, 0.0, 0.0)

    def extend(self, current, i, j, direction):
        if direction == Direction.FORWARD:
            return current + self.data.service_time(i) + self.data.arc(i, j)
        return current + self.data.service_time(j) + self.data.arc(j, i)

    def is_feasible(self, current, node, direction, bounding=None):
        return current <= self.data.upper_bound + TOLERANCE

    def join(self, fw, bw, i, j):
        total = fw + self.data.service_time(i) + self.data.arc(i, j) + bw
        if total > self.data.upper_bound + TOLERANCE:
            return INFEASIBLE
        return total

    def increment_bound(self, i, j, direction):
        if direction == Direction.FORWARD:
            return self.data.service_time(i) + self.data.arc(i, j)
        return self.data.service_time(j) + self.data.arc(j, i)


class TimeWindows(Time):
    """
    Service start times constrained by per-node windows, waiting allowed.

    Backward labels run on the mirrored time axis: a value v at node i
    means service at i must start no later than H - v, where the horizon
    H covers every window plus service and the longest arc. Window closes
    are clamped to the upper bound at construction.
    """

    kind = ResourceKind.TIME_WINDOWS

    def __init__(self, data, name=None):
        if data.windows is None:
            raise ResourceError('time windows resource without windows')
        super().__init__(data, name)
        self.open = [float(w[0]) for w in data.windows]
        self.close = [min(float(w[1]), data.upper_bound) for w in data.windows]
        for node, (open_, close) in enumerate(zip(self.open, self.close)):
            if open_ > close:
                raise ResourceError(f'window of node {node} closes before the upper bound allows')
        longest_arc = 0.0
        if data.arc_consumption is not None:
            longest_arc = max((value for _, value in data.arc_consumption.items()), default=0.0)
        self.horizon = max(
            self.close[k] + data.service_time(k) for k in range(len(self.close))
        ) + longest_arc

    def init(self, origin, destination):
        forward = max(0.0, self.open[origin])
        backward = max(0.0, self.horizon - self.close[destination])
        return self._checked_init(origin, destination, forward, backward)

    def extend(self, current, i, j, direction):
        if direction == Direction.FORWARD:
            return max(self.open[j], current + self.data.service_time(i) + self.data.arc(i, j))
        return max(
            self.horizon - self.close[j],
            current + self.data.service_time(j) + self.data.arc(j, i),
        )

    def is_feasible(self, current, node, direction, bounding=None):
        return current <= self.limit(node, direction) + TOLERANCE

    def join(self, fw, bw, i, j):
        arrival = fw + self.data.service_time(i) + self.data.arc(i, j)
        if arrival > self.horizon - bw + TOLERANCE:
            return INFEASIBLE
        return arrival + bw

    def meets_lower_bound(self, total):
        return True

    def critical_bound(self):
        return self.horizon

    def limit(self, node, direction):
        if direction == Direction.FORWARD:
            return self.close[node]
        return self.horizon - self.open[node]


RESOURCE_CLASSES = {
    ResourceKind.CAPACITY: Capacity,
    ResourceKind.TIME: Time,
    ResourceKind.NODE_LIMIT: NodeLimit,
    ResourceKind.TIME_WINDOWS: TimeWindows,
}


def make_resource(kind, data, name=None):
    """Instantiate a standard resource kind."""
    try:
        resource_class = RESOURCE_CLASSES[ResourceKind(kind)]
    except (KeyError, ValueError):
        raise ResourceError(f'no standard resource of kind {kind!r}')
    return resource_class(data, name)

import bisect
import heapq
import itertools

from django.db import models

from resources.models import TOLERANCE, Direction


class SelectionStrategy(models.TextChoices):
    NODE = 'node', 'Node selection'
    ROUND_ROBIN = 'rr', 'Round robin selection'


class JoinMode(models.TextChoices):
    NAIVE = 'naive', 'Naive'
    BOUNDED = 'bounded', 'Bounded'


class InsertOutcome(models.TextChoices):
    KEPT = 'kept', 'Kept'
    DOMINATED = 'dominated', 'Dominated on arrival'


class Label:
    """
    Dynamic programming state for a partial path.

    Forward labels at node i stand for a path source..i, backward labels
    for a path i..destination. ``visited`` and ``unreachable`` are integer
    bit sets over node ids.
    """

    __slots__ = (
        'node', 'direction', 'cost', 'resources', 'visited', 'unreachable',
        'predecessor', 'serial', 'active', 'extended',
    )

    def __init__(self, node, direction, cost, resources, visited, unreachable=0,
                 predecessor=None, serial=0):
        self.node = node
        self.direction = direction
        self.cost = cost
        self.resources = resources
        self.visited = visited
        self.unreachable = unreachable
        self.predecessor = predecessor
        self.serial = serial
        self.active = True
        self.extended = False

    def __repr__(self):
        return (
            f'Label({self.direction.value} node={self.node} cost={self.cost} '
            f'resources={self.resources} visited={self.visited:b})'
        )

    @property
    def forbidden(self):
        return self.visited | self.unreachable

    def chain(self):
        """Labels from this one back to the root of its predecessor chain."""
        label = self
        while label is not None:
            yield label
            label = label.predecessor

    def tour(self):
        """
        Node sequence of the partial path, in travel order.

        Forward tours run source..node, backward tours node..destination.
        """
        nodes = [label.node for label in self.chain()]
        if self.direction == Direction.FORWARD:
            nodes.reverse()
        return nodes

    def compress(self):
        """Keep node, cost and predecessor only."""
        self.resources = None
        self.visited = 0
        self.unreachable = 0

    def dominates(self, other):
        return dominates(self, other)


def dominates(a, b):
    """
    Weak dominance of a over b at the same node and direction.

    a dominates b when it is no more expensive, uses no more of any
    resource, and forbids a subset of what b forbids. On equal cost a must
    also have the lexicographically smaller or equal tour, so that the
    smallest optimal tour always survives.
    """
    if a.cost > b.cost + TOLERANCE:
        return False
    if a.forbidden & ~b.forbidden:
        return False
    for mine, theirs in zip(a.resources, b.resources):
        if mine > theirs + TOLERANCE:
            return False
    if a.cost >= b.cost - TOLERANCE:
        return a.tour() <= b.tour()
    return True


class LabelPool:
    """
    Non-dominated labels of one direction, bucketed by node and sorted by
    cost within a bucket.

    The frontier holds labels not yet extended. It is kept as one heap per
    node plus a global heap for node selection; removed labels stay in the
    heaps and are skipped when popped.
    """

    def __init__(self, n, direction, strategy=SelectionStrategy.NODE, compress=False, counters=None):
        self.n = n
        self.direction = Direction(direction)
        self.strategy = SelectionStrategy(strategy)
        self.compress = compress
        self.counters = counters
        self.buckets = [[] for _ in range(n)]
        self._costs = [[] for _ in range(n)]
        self._node_heaps = [[] for _ in range(n)]
        self._global_heap = []
        self._frontier_size = [0] * n
        self._serials = itertools.count()
        self._draining = None
        self._cursor = 0
        self._suffix = 'fw' if self.direction == Direction.FORWARD else 'bw'

        self.generated = 0
        self.kept = 0
        self.dominated_on_arrival = 0
        self.evicted = 0

    def __len__(self):
        return sum(len(bucket) for bucket in self.buckets)

    def __iter__(self):
        for bucket in self.buckets:
            yield from bucket

    def labels(self, node):
        return self.buckets[node]

    @property
    def frontier_size(self):
        return sum(self._frontier_size)

    def _record(self, name):
        if self.counters is not None:
            self.counters.record(f'{name}_{self._suffix}')

    def insert(self, label):
        """
        Insert a feasible label unless a bucket member dominates it.

        Buckets stay sorted by cost, so only members at most TOLERANCE more
        expensive can dominate the new label and only members at most
        TOLERANCE cheaper can be dominated by it.

        Returns:
            InsertOutcome
        """
        self.generated += 1
        self._record('labels')
        node = label.node
        bucket = self.buckets[node]
        costs = self._costs[node]
        upper = bisect.bisect_right(costs, label.cost + TOLERANCE)
        for member in itertools.islice(bucket, upper):
            if dominates(member, label):
                self.dominated_on_arrival += 1
                self._record('dominated')
                return InsertOutcome.DOMINATED

        lower = bisect.bisect_left(costs, label.cost - TOLERANCE)
        survivors, survivor_costs = bucket[:lower], costs[:lower]
        for member in itertools.islice(bucket, lower, None):
            if dominates(label, member):
                self._evict(member)
            else:
                survivors.append(member)
                survivor_costs.append(member.cost)
        position = bisect.bisect_right(survivor_costs, label.cost)
        survivors.insert(position, label)
        survivor_costs.insert(position, label.cost)
        self.buckets[node] = survivors
        self._costs[node] = survivor_costs

        label.serial = next(self._serials)
        entry = (label.cost, label.serial, label)
        heapq.heappush(self._node_heaps[node], entry)
        heapq.heappush(self._global_heap, entry)
        self._frontier_size[node] += 1
        self.kept += 1
        return InsertOutcome.KEPT

    def _evict(self, label):
        label.active = False
        if not label.extended:
            self._frontier_size[label.node] -= 1
        if self.compress:
            label.compress()
        self.evicted += 1
        self._record('evicted')

    def _pop_node(self, node):
        heap = self._node_heaps[node]
        while heap:
            _, _, label = heapq.heappop(heap)
            if label.active and not label.extended:
                label.extended = True
                self._frontier_size[node] -= 1
                return label
        return None

    def _peek_global(self):
        heap = self._global_heap
        while heap:
            label = heap[0][2]
            if label.active and not label.extended:
                return label
            heapq.heappop(heap)
        return None

    def get_candidate(self, strategy=None):
        """
        Next label to extend, or None when the frontier is empty.

        Node selection drains the node that holds the cheapest frontier
        label before choosing again. Round robin returns the cheapest
        frontier label of each node in ascending node order.
        """
        strategy = SelectionStrategy(strategy or self.strategy)
        if strategy == SelectionStrategy.NODE:
            if self._draining is not None and self._frontier_size[self._draining]:
                return self._pop_node(self._draining)
            cheapest = self._peek_global()
            if cheapest is None:
                self._draining = None
                return None
            self._draining = cheapest.node
            return self._pop_node(cheapest.node)

        for offset in range(self.n):
            node = (self._cursor + offset) % self.n
            if self._frontier_size[node]:
                self._cursor = node + 1
                return self._pop_node(node)
        return None

    def lookup(self, node, predicate=None):
        """Bucket labels at node matching predicate."""
        return [label for label in self.buckets[node] if predicate is None or predicate(label)]

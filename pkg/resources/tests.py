import math
import random

from django.test import SimpleTestCase

from graphs.models import ArcMap, StorageMode
from pathwise.exceptions import InfeasibleAtSource, ResourceError
from resources.kinds import Capacity, NodeLimit, Time, TimeWindows, make_resource
from resources.models import Direction, ResourceData, ResourceKind

FW = Direction.FORWARD
BW = Direction.BACKWARD


def complete_arc_map(n, values):
    return ArcMap.from_items(
        n, StorageMode.DENSE_BITS,
        (((i, j), values(i, j)) for i in range(n) for j in range(n) if i != j),
    )


def random_tour(rng, n):
    """Elementary tour 0 .. n-1 over a random subset of interior nodes."""
    interior = list(range(1, n - 1))
    rng.shuffle(interior)
    return [0] + interior[:rng.randint(0, len(interior))] + [n - 1]


def forward_values(resource, tour):
    value = resource.init(tour[0], tour[-1])[0]
    values = [value]
    for i, j in zip(tour, tour[1:]):
        value = resource.extend(value, i, j, FW)
        values.append(value)
    return values


def backward_values(resource, tour):
    """Backward values aligned with tour positions."""
    value = resource.init(tour[0], tour[-1])[1]
    values = [value]
    reversed_tour = tour[::-1]
    for i, j in zip(reversed_tour, reversed_tour[1:]):
        value = resource.extend(value, i, j, BW)
        values.append(value)
    return values[::-1]


class ResourceDataTest(SimpleTestCase):
    """Test suite for ResourceData"""

    def test_defaults(self):
        """Test absent consumptions default to zero"""
        data = ResourceData(upper_bound=5)
        self.assertEqual(data.node(3), 0.0)
        self.assertEqual(data.arc(0, 1), 0.0)
        self.assertEqual(data.service_time(2), 0.0)

    def test_inverted_bounds_rejected(self):
        """Test that lower bound above upper bound raises"""
        with self.assertRaises(ResourceError):
            ResourceData(lower_bound=3, upper_bound=2).validate()

    def test_inverted_window_rejected(self):
        """Test that a window closing before it opens raises"""
        with self.assertRaises(ResourceError):
            ResourceData(upper_bound=100, windows=[(0, 10), (20, 5)]).validate()

    def test_node_count_checked(self):
        """Test node consumption length against the node count"""
        with self.assertRaises(ResourceError):
            ResourceData(upper_bound=2, node_consumption=[0, 1]).validate(n=3)


class CapacityTest(SimpleTestCase):
    """Test suite for the capacity resource"""

    def setUp(self):
        self.capacity = Capacity(ResourceData(upper_bound=2, node_consumption=[0, 1, 1, 0]))

    def test_init(self):
        """Test initial values are the endpoint demands"""
        self.assertEqual(self.capacity.init(0, 3), (0, 0))

    def test_extend(self):
        """Test extension adds the demand of the entered node"""
        self.assertEqual(self.capacity.extend(1, 1, 2, FW), 2)
        self.assertEqual(self.capacity.extend(0, 3, 2, BW), 1)

    def test_bound_inclusive(self):
        """Test that a value equal to the bound is feasible"""
        self.assertTrue(self.capacity.is_feasible(2, 1, FW))
        self.assertFalse(self.capacity.is_feasible(3, 1, FW))

    def test_join(self):
        """Test joining on T4 arc (1, 2)"""
        self.assertEqual(self.capacity.join(1, 1, 1, 2), 2)
        self.assertIsNone(self.capacity.join(2, 1, 1, 2))

    def test_infeasible_at_source(self):
        """Test that an overloaded origin raises"""
        capacity = Capacity(ResourceData(upper_bound=1, node_consumption=[5, 0]))
        with self.assertRaises(InfeasibleAtSource):
            capacity.init(0, 1)

    def test_lower_bound_on_totals(self):
        """Test that lower bounds apply to complete totals"""
        capacity = Capacity(ResourceData(lower_bound=2, upper_bound=4))
        self.assertFalse(capacity.meets_lower_bound(1))
        self.assertTrue(capacity.meets_lower_bound(2))


class NodeLimitTest(SimpleTestCase):
    """Test suite for the node limit resource"""

    def setUp(self):
        self.limit = NodeLimit(ResourceData(upper_bound=3))

    def test_init_counts_endpoints(self):
        """Test both initial values count their endpoint"""
        self.assertEqual(self.limit.init(0, 2), (1, 1))

    def test_extend_either_direction(self):
        """Test extension adds one node"""
        self.assertEqual(self.limit.extend(3, 0, 1, FW), 4)
        self.assertEqual(self.limit.extend(3, 1, 0, BW), 4)

    def test_join(self):
        """Test join adds both counts"""
        self.assertEqual(self.limit.join(2, 1, 0, 1), 3)
        self.assertIsNone(self.limit.join(2, 2, 0, 1))

    def test_feasibility(self):
        """Test the upper bound check"""
        limit = NodeLimit(ResourceData(upper_bound=8))
        self.assertFalse(limit.is_feasible(9, 0, FW))


class TimeWindowsTest(SimpleTestCase):
    """Test suite for the time windows resource"""

    def setUp(self):
        self.times = complete_arc_map(3, lambda i, j: 3)
        self.data = ResourceData(
            upper_bound=1000,
            arc_consumption=self.times,
            windows=[(5, 200), (20, 100), (0, 300)],
            service=[5, 5, 0],
        )
        self.resource = TimeWindows(self.data)

    def test_forward_init_clamps_to_opening(self):
        """Test forward init waits for the origin window"""
        self.assertEqual(self.resource.init(0, 2)[0], 5)

    def test_horizon(self):
        """Test the horizon covers windows, service and the longest arc"""
        self.assertEqual(self.resource.horizon, 303)
        self.assertEqual(self.resource.critical_bound(), 303)

    def test_forward_waits(self):
        """Test waiting until the window opens"""
        self.assertEqual(self.resource.extend(10, 0, 1, FW), 20)

    def test_forward_feasibility(self):
        """Test arrival after the close is rejected"""
        self.assertFalse(self.resource.is_feasible(101, 1, FW))
        self.assertTrue(self.resource.is_feasible(100, 1, FW))

    def test_backward_feasibility_uses_mirrored_window(self):
        """Test backward values are checked against H - open"""
        self.assertTrue(self.resource.is_feasible(303 - 20, 1, BW))
        self.assertFalse(self.resource.is_feasible(303 - 19, 1, BW))

    def test_closes_clamped_to_upper_bound(self):
        """Test that closes larger than the upper bound are clamped"""
        data = ResourceData(upper_bound=50, windows=[(0, 80), (10, 90)])
        resource = TimeWindows(data)
        self.assertEqual(resource.close, [50, 50])

    def test_window_beyond_upper_bound_rejected(self):
        """Test a window opening after the upper bound"""
        with self.assertRaises(ResourceError):
            TimeWindows(ResourceData(upper_bound=5, windows=[(0, 10), (8, 9)]))

    def test_missing_windows_rejected(self):
        """Test that windows are required"""
        with self.assertRaises(ResourceError):
            TimeWindows(ResourceData(upper_bound=5))


class ResourceFactoryTest(SimpleTestCase):
    """Test suite for make_resource"""

    def test_standard_kinds(self):
        """Test every standard kind is constructible by name"""
        self.assertIsInstance(make_resource('capacity', ResourceData(upper_bound=1)), Capacity)
        self.assertIsInstance(make_resource('nodelimit', ResourceData(upper_bound=1)), NodeLimit)
        self.assertIsInstance(make_resource(ResourceKind.TIME, ResourceData(upper_bound=1)), Time)

    def test_custom_kind_rejected(self):
        """Test that custom kinds have no standard class"""
        with self.assertRaises(ResourceError):
            make_resource('custom', ResourceData())


class ResourcePropertyTest(SimpleTestCase):
    """Property checks over random complete digraphs"""

    n = 7

    def build_resources(self, rng):
        n = self.n
        demands = [0] + [rng.randint(1, 10) for _ in range(n - 2)] + [0]
        times = complete_arc_map(n, lambda i, j: rng.randint(1, 30))
        arc_loads = complete_arc_map(n, lambda i, j: rng.randint(0, 3))
        service = [rng.choice([0, 10, 20]) for _ in range(n)]
        windows = []
        for _ in range(n):
            open_ = rng.randint(0, 150)
            windows.append((open_, open_ + rng.randint(20, 200)))
        windows[0] = (0, 1000)
        windows[-1] = (0, 1000)
        return [
            Capacity(ResourceData(upper_bound=30, node_consumption=demands, arc_consumption=arc_loads)),
            NodeLimit(ResourceData(upper_bound=n)),
            Time(ResourceData(upper_bound=math.inf, arc_consumption=times, service=service)),
            TimeWindows(ResourceData(upper_bound=1000, arc_consumption=times,
                                     windows=windows, service=service)),
        ]

    def test_monotonicity(self):
        """Test extend never decreases a value"""
        rng = random.Random(11)
        for _ in range(20):
            for resource in self.build_resources(rng):
                for i in range(self.n):
                    for j in range(self.n):
                        if i == j:
                            continue
                        current = rng.uniform(0, 100)
                        self.assertGreaterEqual(resource.extend(current, i, j, FW), current)
                        self.assertGreaterEqual(resource.extend(current, i, j, BW), current)

    def test_increment_bound_is_a_lower_bound(self):
        """Test the per-arc increment bound never exceeds the real increment"""
        rng = random.Random(5)
        for resource in self.build_resources(rng):
            for i in range(self.n):
                for j in range(self.n):
                    if i == j:
                        continue
                    for direction in (FW, BW):
                        step = resource.extend(0.0, i, j, direction)
                        self.assertLessEqual(resource.increment_bound(i, j, direction), step + 1e-9)

    def test_feasibility_monotone_in_value(self):
        """Test a smaller value stays feasible"""
        rng = random.Random(3)
        for resource in self.build_resources(rng):
            for node in range(self.n):
                for direction in (FW, BW):
                    limit = resource.limit(node, direction)
                    if math.isinf(limit):
                        continue
                    self.assertTrue(resource.is_feasible(limit, node, direction))
                    self.assertTrue(resource.is_feasible(limit / 2, node, direction))
                    self.assertFalse(resource.is_feasible(limit + 1, node, direction))

    def test_direction_consistency(self):
        """Test joining at any split reproduces the forward accumulation"""
        rng = random.Random(7)
        for _ in range(30):
            resources = self.build_resources(rng)
            tour = random_tour(rng, self.n)
            for resource in resources[:3]:
                total = forward_values(resource, tour)[-1]
                fw = forward_values(resource, tour)
                bw = backward_values(resource, tour)
                for k in range(len(tour) - 1):
                    i, j = tour[k], tour[k + 1]
                    joined = resource.join(fw[k], bw[k + 1], i, j)
                    if total <= resource.data.upper_bound:
                        self.assertAlmostEqual(joined, total, delta=1e-6)
                    else:
                        self.assertIsNone(joined)

    def test_time_window_split_feasibility(self):
        """Test a tour is window feasible iff every split joins feasibly"""
        rng = random.Random(13)
        checked = 0
        for _ in range(200):
            windows = self.build_resources(rng)[3]
            tour = random_tour(rng, self.n)
            fw = forward_values(windows, tour)
            bw = backward_values(windows, tour)
            whole = all(windows.is_feasible(v, node, FW) for v, node in zip(fw, tour))
            for k in range(len(tour) - 1):
                prefix = all(windows.is_feasible(v, node, FW) for v, node in zip(fw[:k + 1], tour))
                suffix = all(windows.is_feasible(v, node, BW) for v, node in zip(bw[k + 1:], tour[k + 1:]))
                split = prefix and suffix and windows.join(fw[k], bw[k + 1], tour[k], tour[k + 1]) is not None
                self.assertEqual(split, whole)
                checked += 1
        self.assertGreater(checked, 0)

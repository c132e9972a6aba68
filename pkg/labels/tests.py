import random

from django.test import SimpleTestCase

from labels.manager import LabelManager
from labels.models import InsertOutcome, JoinMode, Label, LabelPool, SelectionStrategy, dominates
from problems import samples
from resources.models import Direction
from telemetry.models import Counters

FULL = [0b1111] * 4


def forward(node, cost, load, visited):
    return Label(node, Direction.FORWARD, cost, (load,), visited)


class DominanceTest(SimpleTestCase):
    """Test suite for label dominance"""

    def test_cheaper_subset_dominates(self):
        """Test a cheaper label with fewer visited nodes wins"""
        a = forward(2, 1, 1, 0b101)
        b = forward(2, 2, 1, 0b111)
        self.assertTrue(dominates(a, b))
        self.assertFalse(dominates(b, a))

    def test_equal_labels(self):
        """Test equal labels dominate each other"""
        a = forward(2, 1, 1, 0b101)
        b = forward(2, 1, 1, 0b101)
        self.assertTrue(a.dominates(b) and b.dominates(a))

    def test_cost_tie_keeps_smaller_tour(self):
        """Test equal cost labels are ordered by tour"""
        low = Label(2, Direction.FORWARD, 3, (1,), 0b111, predecessor=forward(1, 1, 0, 0b11))
        high = Label(2, Direction.FORWARD, 3, (0,), 0b111, predecessor=forward(3, 1, 0, 0b1001))
        self.assertFalse(dominates(high, low))
        self.assertFalse(dominates(low, high))
        cheaper = Label(2, Direction.FORWARD, 2, (0,), 0b111, predecessor=forward(3, 1, 0, 0b1001))
        self.assertTrue(dominates(cheaper, low))

    def test_incomparable_visited_sets(self):
        """Test labels with crossing visited sets"""
        a = forward(2, 1, 1, 0b101)
        b = forward(2, 1, 1, 0b110)
        self.assertFalse(dominates(a, b))
        self.assertFalse(dominates(b, a))

    def test_resource_must_not_exceed(self):
        """Test that more resource use blocks dominance"""
        a = forward(2, 1, 2, 0b1)
        b = forward(2, 5, 1, 0b1)
        self.assertFalse(dominates(a, b))

    def test_unreachable_counts_as_forbidden(self):
        """Test unreachable bits enter the subset rule"""
        a = forward(2, 1, 1, 0b101)
        a.unreachable = 0b1000
        b = forward(2, 1, 1, 0b101)
        self.assertFalse(dominates(a, b))
        b.unreachable = 0b1000
        self.assertTrue(dominates(a, b))

    def test_tolerance(self):
        """Test differences below the tolerance are ties"""
        a = forward(2, 1 + 1e-12, 1, 0b1)
        b = forward(2, 1, 1, 0b1)
        self.assertTrue(dominates(a, b))


class LabelTest(SimpleTestCase):
    """Test suite for Label"""

    def test_tours(self):
        """Test tour order in both directions"""
        root = forward(0, 0, 0, 0b1)
        middle = Label(1, Direction.FORWARD, 1, (1,), 0b11, predecessor=root)
        self.assertEqual(middle.tour(), [0, 1])
        end = Label(3, Direction.BACKWARD, 0, (0,), 0b1000)
        back = Label(2, Direction.BACKWARD, 1, (1,), 0b1100, predecessor=end)
        self.assertEqual(back.tour(), [2, 3])

    def test_compress(self):
        """Test compressed labels keep their tour"""
        root = forward(0, 0, 0, 0b1)
        label = Label(1, Direction.FORWARD, 1, (1,), 0b11, predecessor=root)
        label.compress()
        self.assertIsNone(label.resources)
        self.assertEqual(label.forbidden, 0)
        self.assertEqual(label.tour(), [0, 1])


class LabelPoolTest(SimpleTestCase):
    """Test suite for LabelPool"""

    def setUp(self):
        self.counters = Counters()
        self.pool = LabelPool(4, Direction.FORWARD, counters=self.counters)

    def test_dominated_on_arrival(self):
        """Test a dominated label is rejected and counted"""
        self.assertEqual(self.pool.insert(forward(1, 1, 1, 0b11)), InsertOutcome.KEPT)
        self.assertEqual(self.pool.insert(forward(1, 2, 1, 0b11)), InsertOutcome.DOMINATED)
        self.assertEqual(self.pool.insert(forward(1, 1, 1, 0b11)), InsertOutcome.DOMINATED)
        self.assertEqual(len(self.pool), 1)
        self.assertEqual(self.pool.generated, 3)
        self.assertEqual(self.counters['labels_fw'], 3)
        self.assertEqual(self.counters['dominated_fw'], 2)

    def test_eviction(self):
        """Test a new label evicts the members it dominates"""
        old = forward(1, 3, 2, 0b11)
        self.pool.insert(old)
        self.pool.insert(forward(1, 1, 1, 0b11))
        self.assertFalse(old.active)
        self.assertEqual(self.pool.evicted, 1)
        self.assertEqual(self.counters['evicted_fw'], 1)
        self.assertEqual(self.pool.frontier_size, 1)
        self.assertEqual(self.pool.get_candidate().cost, 1)
        self.assertIsNone(self.pool.get_candidate())

    def test_evicted_label_compressed(self):
        """Test eviction compresses when asked to"""
        pool = LabelPool(4, Direction.FORWARD, compress=True)
        old = forward(1, 3, 2, 0b11)
        pool.insert(old)
        pool.insert(forward(1, 1, 1, 0b11))
        self.assertIsNone(old.resources)

    def fill(self, strategy):
        pool = LabelPool(4, Direction.FORWARD, strategy)
        pool.insert(forward(2, 5, 1, 0b101))
        pool.insert(forward(1, 3, 0, 0b11))
        pool.insert(forward(1, 1, 2, 0b11))
        return pool

    def drain(self, pool):
        order = []
        label = pool.get_candidate()
        while label is not None:
            order.append((label.node, label.cost))
            label = pool.get_candidate()
        return order

    def test_node_selection(self):
        """Test the node of the cheapest label is drained first"""
        self.assertEqual(self.drain(self.fill(SelectionStrategy.NODE)), [(1, 1), (1, 3), (2, 5)])

    def test_round_robin(self):
        """Test nodes take turns in ascending order"""
        self.assertEqual(self.drain(self.fill(SelectionStrategy.ROUND_ROBIN)), [(1, 1), (2, 5), (1, 3)])

    def test_extended_labels_stay_in_bucket(self):
        """Test extension only leaves the frontier"""
        pool = self.fill(SelectionStrategy.NODE)
        self.drain(pool)
        self.assertEqual(pool.frontier_size, 0)
        self.assertEqual(len(pool.labels(1)), 2)
        self.assertEqual(len(pool.lookup(1, lambda label: label.cost > 2)), 1)

    def test_buckets_sorted_by_cost(self):
        """Test bucket members stay in cost order whatever the insertion order"""
        for cost, load in ((5, 0), (2, 3), (7, 0), (3, 2), (2.5, 2)):
            self.pool.insert(forward(1, cost, load, 0b11))
        costs = [label.cost for label in self.pool.labels(1)]
        self.assertEqual(costs, sorted(costs))
        self.assertEqual(costs, [2, 2.5, 5])

    def test_equal_cost_keeps_smaller_tour(self):
        """Test the smaller tour survives a cost tie in either insertion order"""
        def tied(middle):
            root = forward(0, 0, 0, 0b1)
            step = Label(middle, Direction.FORWARD, 1, (1,), 0b1 | 1 << middle, predecessor=root)
            return Label(2, Direction.FORWARD, 5, (2,), 0b1111, predecessor=step)

        for order in ((1, 3), (3, 1)):
            pool = LabelPool(4, Direction.FORWARD)
            for middle in order:
                pool.insert(tied(middle))
            with self.subTest(order=order):
                self.assertEqual([label.tour() for label in pool.labels(2)], [[0, 1, 2]])

    def test_random_inserts_keep_frontier(self):
        """Test ten thousand random inserts leave a non-dominated frontier"""
        rng = random.Random(11)
        pool = LabelPool(6, Direction.FORWARD, SelectionStrategy.NODE)
        for step in range(10000):
            label = Label(
                rng.randrange(6), Direction.FORWARD, rng.randint(0, 40),
                (rng.randint(0, 6), rng.randint(0, 6)), rng.getrandbits(4),
            )
            pool.insert(label)
            if step % 7 == 0:
                candidate = pool.get_candidate()
                if candidate is not None:
                    self.assertIn(candidate, pool.labels(candidate.node))
                    self.assertTrue(candidate.active)

        self.assertEqual(pool.generated, 10000)
        self.assertEqual(pool.kept + pool.dominated_on_arrival, pool.generated)
        self.assertEqual(len(pool), pool.kept - pool.evicted)
        self.assertEqual(pool.frontier_size, sum(1 for label in pool if not label.extended))
        for node in range(6):
            bucket = pool.labels(node)
            costs = [label.cost for label in bucket]
            self.assertEqual(costs, sorted(costs))
            for first in bucket:
                self.assertTrue(first.active)
                for second in bucket:
                    if first is not second:
                        self.assertFalse(dominates(first, second), (first, second))

        candidate = pool.get_candidate()
        while candidate is not None:
            self.assertIn(candidate, pool.labels(candidate.node))
            candidate = pool.get_candidate()
        self.assertEqual(pool.frontier_size, 0)
        self.assertTrue(all(label.extended for label in pool))


class LabelManagerTest(SimpleTestCase):
    """Test suite for LabelManager on T4"""

    def setUp(self):
        self.problem = samples.t4()
        self.manager = LabelManager(self.problem, FULL)
        self.fw_root = self.manager.initial_label(Direction.FORWARD)
        self.bw_root = self.manager.initial_label(Direction.BACKWARD)

    def test_roots(self):
        """Test initial labels"""
        self.assertEqual((self.fw_root.node, self.fw_root.resources), (0, (0,)))
        self.assertEqual((self.bw_root.node, self.bw_root.resources), (3, (0,)))
        self.assertEqual(self.bw_root.visited, 0b1000)

    def test_extend(self):
        """Test forward and backward extension"""
        label = self.manager.extend_label(self.fw_root, 1)
        self.assertEqual((label.cost, label.resources, label.visited), (1, (1,), 0b11))
        label = self.manager.extend_label(label, 2)
        self.assertEqual((label.cost, label.resources), (2, (2,)))
        self.assertIsNone(self.manager.extend_label(label, 1))

        back = self.manager.extend_label(self.bw_root, 2)
        self.assertEqual((back.cost, back.resources, back.visited), (1, (1,), 0b1100))

    def test_capacity_violation(self):
        """Test an extension over the bound is infeasible"""
        manager = LabelManager(samples.t4(capacity=1), FULL)
        label = manager.extend_label(manager.initial_label(Direction.FORWARD), 1)
        self.assertIsNone(manager.extend_label(label, 2))

    def test_missing_arc(self):
        """Test extension along a missing arc"""
        label = self.manager.extend_label(self.fw_root, 2)
        self.assertIsNone(self.manager.extend_label(label, 1))

    def test_masks_limit_memory(self):
        """Test visited bits outside the mask are forgotten"""
        manager = LabelManager(self.problem, [1 << k for k in range(4)])
        label = manager.extend_label(manager.initial_label(Direction.FORWARD), 1)
        self.assertEqual(label.visited, 0b10)

    def test_half_way_threshold(self):
        """Test the threshold in both directions"""
        label = self.manager.try_extend(self.fw_root, 1, 1, hwp=1)
        self.assertIsNotNone(label)
        self.assertIsNone(self.manager.try_extend(label, 2, 1, hwp=1))

        back = self.manager.extend_label(self.bw_root, 2)
        self.assertIsNotNone(self.manager.try_extend(back, 1, 1, hwp=1))
        self.assertIsNone(self.manager.try_extend(back, 1, 1, hwp=1.5))

    def test_terminal_rules(self):
        """Test labels never re-enter their root or pass the other terminal"""
        back = self.manager.extend_label(self.bw_root, 2)
        self.assertFalse(self.manager.allowed_target(self.fw_root, 0))
        self.assertFalse(self.manager.allowed_target(back, 3))
        self.assertFalse(self.manager.allowed_target(back, 0))
        self.assertTrue(self.manager.allowed_target(back, 1))
        at_destination = self.manager.extend_label(self.fw_root, 3)
        self.assertFalse(self.manager.is_extension_feasible(at_destination, 1, hwp=2))

    def test_neighbors(self):
        """Test neighbours come with arc costs"""
        self.assertEqual(self.manager.neighbors(self.fw_root), ((1, 1.0), (2, 4.0), (3, 10.0)))
        self.assertEqual(self.manager.neighbors(self.bw_root), ((0, 10.0), (1, 5.0), (2, 1.0)))

    def test_join_pair(self):
        """Test joining over arc (1, 2)"""
        fw = self.manager.extend_label(self.fw_root, 1)
        bw = self.manager.extend_label(self.bw_root, 2)
        joined = self.manager.join_pair(fw, bw)
        self.assertEqual(joined.cost, 3)
        self.assertEqual(joined.resources, (2,))
        self.assertEqual(joined.tour(), [0, 1, 2, 3])
        self.assertIsNone(self.manager.join_pair(fw, bw, bound=2, mode=JoinMode.BOUNDED))
        self.assertIsNotNone(self.manager.join_pair(fw, bw, bound=2, mode=JoinMode.NAIVE))

    def test_join_pair_capacity(self):
        """Test the joined capacity respects the bound"""
        manager = LabelManager(samples.t4(capacity=1), FULL)
        fw = manager.extend_label(manager.initial_label(Direction.FORWARD), 1)
        bw = manager.extend_label(manager.initial_label(Direction.BACKWARD), 2)
        self.assertIsNone(manager.join_pair(fw, bw))

    def test_complete(self):
        """Test forward labels at the destination finish directly"""
        direct = self.manager.extend_label(self.fw_root, 3)
        self.assertEqual(self.manager.complete(direct).cost, 10)
        self.assertIsNone(self.manager.complete(self.fw_root))

    def pools(self):
        fw_pool = LabelPool(4, Direction.FORWARD)
        bw_pool = LabelPool(4, Direction.BACKWARD)
        fw_pool.insert(self.fw_root)
        for j in (1, 2):
            fw_pool.insert(self.manager.extend_label(self.fw_root, j))
        bw_pool.insert(self.bw_root)
        for j in (1, 2):
            bw_pool.insert(self.manager.extend_label(self.bw_root, j))
        return fw_pool, bw_pool

    def test_join_naive(self):
        """Test the naive join tries every pair"""
        counters = Counters()
        best, attempts, successes = self.manager.join(*self.pools(), mode=JoinMode.NAIVE, counters=counters)
        self.assertEqual(best.cost, 3)
        self.assertEqual(best.tour(), [0, 1, 2, 3])
        self.assertEqual((attempts, successes), (6, 6))
        self.assertEqual(counters['join_attempts'], 6)

    def test_join_bounded(self):
        """Test the bounded join finds the same optimum with fewer attempts"""
        best, attempts, _ = self.manager.join(*self.pools(), mode=JoinMode.BOUNDED)
        self.assertEqual(best.cost, 3)
        self.assertLessEqual(attempts, 6)
        best, _, _ = self.manager.join(*self.pools(), incumbent=2, mode=JoinMode.BOUNDED)
        self.assertIsNone(best)

    def test_unreachable_nodes(self):
        """Test labels mark nodes their capacity can no longer reach"""
        manager = LabelManager(samples.t4(capacity=1), FULL, unreachable=True)
        label = manager.extend_label(manager.initial_label(Direction.FORWARD), 1)
        # node 0 has no way back in, node 2 needs a second unit
        self.assertEqual(label.unreachable, 0b101)
        self.assertIsNone(manager.extend_label(label, 2))

    def test_replay(self):
        """Test replaying a tour in both directions"""
        labels = self.manager.replay([0, 1, 2, 3])
        self.assertEqual([label.node for label in labels], [0, 1, 2, 3])
        self.assertEqual(labels[-1].cost, 3)
        labels = self.manager.replay([0, 1, 2, 3], Direction.BACKWARD)
        self.assertEqual([label.node for label in labels], [3, 2, 1, 0])
        self.assertEqual(labels[-1].resources, (2,))

from django.test import SimpleTestCase

from graphs.models import ArcMap
from graphs.services import build_graph
from instgen.services import random_problem
from labels.manager import LabelManager
from labels.models import Label, LabelPool
from oracle.services import enumerate_paths
from pathwise.exceptions import ConfigError, DecodeMismatch, TimeLimitReached
from problems import samples
from problems.models import CyclicityClass, Problem
from resources.kinds import Capacity
from resources.models import Direction, ResourceData
from solver.models import PathStatus, SolverConfig
from solver.services import extract_path, run_direction_pass, solve
from telemetry.models import Counters

ELEMENTARY_SCHEMES = ('dssr', 'dssrc', 'ng-dssrc', 'ngc-dssrc')
ALL_SCHEMES = ELEMENTARY_SCHEMES + ('ng', 'ngc')


def cyclic(**overrides):
    return SolverConfig.from_settings(CyclicityClass.CYCLIC, **overrides)


def acyclic(**overrides):
    return SolverConfig.from_settings(CyclicityClass.ACYCLIC, **overrides)


class Battery(Capacity):
    """Capacity that may be recharged, so it cannot drive the split."""

    monotone = False


class SampleSolveTest(SimpleTestCase):
    """Test suite for solve on the hand-checked samples"""

    def test_t4(self):
        """Test the T4 optimum"""
        path, stats = solve(samples.t4(), acyclic(relaxation='dssr'))
        self.assertEqual(path.status, PathStatus.OPTIMAL)
        self.assertEqual(path.tour, [0, 1, 2, 3])
        self.assertEqual(path.cost, 3)
        self.assertEqual(path.consumptions, (2.0,))
        self.assertTrue(path.elementary)
        self.assertEqual(stats.iterations, 1)

    def test_t4_default_config(self):
        """Test solving without an explicit config"""
        path, _ = solve(samples.t4())
        self.assertEqual(path.cost, 3)

    def test_t4_tight_capacity(self):
        """Test T4 with room for one demand"""
        path, _ = solve(samples.t4(capacity=1))
        self.assertEqual(path.status, PathStatus.OPTIMAL)
        self.assertEqual(path.tour, [0, 2, 3])
        self.assertEqual(path.cost, 5)

    def test_t3neg_every_scheme(self):
        """Test the negative three node instance under every scheme"""
        for scheme in ALL_SCHEMES:
            with self.subTest(scheme=scheme):
                path, _ = solve(samples.t3neg(), cyclic(relaxation=scheme))
                self.assertEqual(path.status, PathStatus.OPTIMAL)
                self.assertEqual(path.tour, [0, 1, 2])
                self.assertEqual(path.cost, -10)

    def test_t4_cycle_iterations(self):
        """Test the relaxation removes the negative loop in a second round"""
        path, stats = solve(samples.t4_cycle(), cyclic(relaxation='ngc-dssrc'))
        self.assertEqual(path.status, PathStatus.OPTIMAL)
        self.assertEqual(path.tour, [0, 1, 2, 3])
        self.assertEqual(path.cost, -7)
        self.assertEqual(stats.iterations, 2)
        self.assertEqual(stats.relaxed_costs, [-17, -7])
        self.assertEqual(stats.incumbents, [None, -7])

    def test_t4_cycle_every_scheme(self):
        """Test wide neighbourhoods reach the elementary optimum"""
        for scheme in ALL_SCHEMES:
            with self.subTest(scheme=scheme):
                path, _ = solve(samples.t4_cycle(), cyclic(relaxation=scheme, ng_size=3))
                self.assertEqual(path.cost, -7)
                self.assertEqual(path.status, PathStatus.OPTIMAL)

    def test_narrow_ng_is_only_feasible(self):
        """Test NG and NGC may stop on a cyclic path"""
        for scheme in ('ng', 'ngc'):
            with self.subTest(scheme=scheme):
                path, _ = solve(samples.t4_cycle(), cyclic(relaxation=scheme, ng_size=1))
                self.assertEqual(path.status, PathStatus.FEASIBLE)
                self.assertFalse(path.elementary)
                self.assertEqual(path.tour, [0, 1, 2, 1, 2, 3])
                self.assertEqual(path.cost, -17)
        path, _ = solve(samples.t4_cycle(), cyclic(relaxation='ngc-dssrc', ng_size=1))
        self.assertEqual(path.cost, -7)

    def test_relaxed_only(self):
        """Test elementary = False returns the first relaxed optimum"""
        path, stats = solve(samples.t4_cycle(), cyclic(elementary=False))
        self.assertEqual(path.status, PathStatus.FEASIBLE)
        self.assertEqual(path.cost, -17)
        self.assertEqual(stats.iterations, 1)


class SolveOutcomeTest(SimpleTestCase):
    """Test suite for infeasible, limited and misconfigured runs"""

    def test_infeasible(self):
        """Test a node limit no path can meet"""
        path, _ = solve(samples.t3neg(node_limit=2))
        self.assertEqual(path.status, PathStatus.INFEASIBLE)
        self.assertFalse(path.found)
        self.assertIsNone(path.cost)

    def test_disconnected(self):
        """Test a graph without a route"""
        graph = build_graph(3, [(0, 1)], 0, 2)
        cost = ArcMap.from_items(3, graph.storage_mode, [((0, 1), 1)])
        problem = Problem(graph, cost, [Capacity(ResourceData(upper_bound=5))])
        path, _ = solve(problem)
        self.assertEqual(path.status, PathStatus.INFEASIBLE)

    def test_infeasible_at_source(self):
        """Test a source demand above the bound"""
        graph = build_graph(2, [(0, 1)], 0, 1)
        cost = ArcMap.from_items(2, graph.storage_mode, [((0, 1), 1)])
        capacity = Capacity(ResourceData(upper_bound=1, node_consumption=[2, 0]))
        path, stats = solve(Problem(graph, cost, [capacity]))
        self.assertEqual(path.status, PathStatus.INFEASIBLE)
        self.assertEqual(stats.iterations, 0)

    def test_time_limit(self):
        """Test an exhausted budget"""
        path, _ = solve(samples.t4_cycle(), cyclic(time_limit=1e-9))
        self.assertEqual(path.status, PathStatus.TIME_LIMIT)
        self.assertFalse(path.found)

    def test_non_monotone_critical(self):
        """Test the critical resource must be monotone"""
        problem = samples.t4()
        data = problem.resources[0].data
        problem = Problem(problem.graph, problem.cost, [Battery(data)])
        with self.assertRaises(ConfigError) as raised:
            solve(problem)
        self.assertEqual(raised.exception.key, 'critical')

    def test_unbounded_critical(self):
        """Test an unbounded critical resource runs forward only"""
        path, stats = solve(samples.t4(capacity=float('inf')))
        self.assertEqual(path.tour, [0, 1, 2, 3])
        self.assertEqual(stats.labels_bw, 0)
        self.assertEqual(stats.hwp_history, [])


class SolveInvarianceTest(SimpleTestCase):
    """Test suite for settings that change the work but never the answer"""

    problems = (samples.t4, samples.t3neg, samples.t4_cycle)

    def assertSameAnswer(self, **overrides):
        for make in self.problems:
            problem = make()
            expected = enumerate_paths(problem)
            path, _ = solve(problem, cyclic(**overrides))
            self.assertEqual(path.cost, expected.optimal_cost, f'{problem} with {overrides}')
            self.assertEqual(path.tour, expected.optimal_tour, f'{problem} with {overrides}')

    def test_half_way_point(self):
        """Test every initial half-way point"""
        for hwp in (0, 0.25, 0.5, 0.75, 1):
            self.assertSameAnswer(hwp=hwp)

    def test_direction(self):
        """Test forward only search"""
        self.assertSameAnswer(direction='forward')

    def test_selection(self):
        """Test both selection strategies"""
        self.assertSameAnswer(selection='node')
        self.assertSameAnswer(selection='rr')

    def test_join_mode(self):
        """Test naive and bounded joins"""
        self.assertSameAnswer(join='naive')
        self.assertSameAnswer(join='bounded')

    def test_parallel(self):
        """Test concurrent passes"""
        self.assertSameAnswer(parallel=True)
        self.assertSameAnswer(parallel=False)

    def test_storage_and_bookkeeping(self):
        """Test storage modes, unreachable sets and compression"""
        self.assertSameAnswer(storage='sparse')
        self.assertSameAnswer(storage='dense')
        self.assertSameAnswer(unreachable=False, compress=True)

    def test_acyclic_fast_path(self):
        """Test dropping the visited set on positive costs"""
        path, _ = solve(samples.t4(), acyclic())
        full, _ = solve(samples.t4(), cyclic(relaxation='dssr'))
        self.assertEqual(path.cost, full.cost)


class SolveStatsTest(SimpleTestCase):
    """Test suite for the statistics of a run"""

    def test_counts(self):
        """Test stats agree with the telemetry counters"""
        counters = Counters()
        _, stats = solve(samples.t4_cycle(), cyclic(), counters)
        self.assertEqual(stats.labels_fw, counters['labels_fw'])
        self.assertEqual(stats.labels_bw, counters['labels_bw'])
        self.assertEqual(stats.join_attempts, counters['join_attempts'])
        self.assertLessEqual(stats.join_successes, stats.join_attempts)
        self.assertEqual(counters['relaxation_iterations'], stats.iterations)
        self.assertEqual(len(stats.hwp_history), stats.iterations)
        self.assertEqual(stats.hwp_history[0], 3)
        for phase in ('forward', 'backward', 'join', 'total'):
            self.assertIn(phase, stats.phase_times)

    def test_telemetry_off(self):
        """Test a disabled sink still yields stats"""
        counters = Counters(enabled=False)
        _, stats = solve(samples.t4(), acyclic(telemetry=False), counters)
        self.assertGreater(stats.labels_fw, 0)
        self.assertEqual(counters.counters, {})

    def test_time_limit_keeps_counts(self):
        """Test labels generated before the deadline are still counted"""
        counters = Counters()
        path, stats = solve(samples.t4_cycle(), cyclic(time_limit=1e-9), counters)
        self.assertEqual(path.status, PathStatus.TIME_LIMIT)
        self.assertGreaterEqual(stats.labels_fw, 1)
        self.assertGreaterEqual(stats.labels_bw, 1)
        self.assertEqual(stats.labels_fw, counters['labels_fw'])
        self.assertEqual(stats.labels_bw, counters['labels_bw'])


class DirectionPassTest(SimpleTestCase):
    """Test suite for run_direction_pass"""

    def setUp(self):
        self.problem = samples.t3neg()
        self.manager = LabelManager(self.problem, [0b111] * 3)

    def run_pass(self, direction, hwp):
        pool = LabelPool(3, direction)
        pool.insert(self.manager.initial_label(direction))
        generated = run_direction_pass(pool, self.manager, hwp)
        return pool, generated

    def test_zero_threshold(self):
        """Test nothing leaves the source below a zero threshold"""
        pool, generated = self.run_pass(Direction.FORWARD, 0)
        self.assertEqual(generated, 0)
        self.assertEqual(pool.generated, 1)

    def test_full_threshold(self):
        """Test the forward pass alone reaches the destination"""
        pool, _ = self.run_pass(Direction.FORWARD, 4)
        self.assertEqual([label.tour() for label in pool.labels(2)], [[0, 1, 2]])
        _, generated = self.run_pass(Direction.BACKWARD, 4)
        self.assertEqual(generated, 0)

    def test_time_limit(self):
        """Test the pass checks its deadline"""
        pool = LabelPool(3, Direction.FORWARD)
        pool.insert(self.manager.initial_label(Direction.FORWARD))
        with self.assertRaises(TimeLimitReached):
            run_direction_pass(pool, self.manager, 4, deadline=0)


class ExtractPathTest(SimpleTestCase):
    """Test suite for extract_path"""

    def setUp(self):
        self.problem = samples.t4()
        self.manager = LabelManager(self.problem, [0b1111] * 4)
        self.fw = self.manager.extend_label(self.manager.initial_label(Direction.FORWARD), 1)
        self.bw = self.manager.extend_label(self.manager.initial_label(Direction.BACKWARD), 2)

    def test_joined_pair(self):
        """Test decoding a forward and a backward label"""
        path = extract_path(self.fw, self.bw, self.problem)
        self.assertEqual(path.tour, [0, 1, 2, 3])
        self.assertEqual(path.cost, 3)
        self.assertEqual(path.consumptions, (2.0,))
        self.assertTrue(path.elementary)

    def test_forward_only(self):
        """Test decoding a forward label at the destination"""
        at_destination = self.manager.extend_label(self.fw, 3)
        path = extract_path(at_destination, None, self.problem)
        self.assertEqual(path.tour, [0, 1, 3])
        self.assertEqual(path.cost, 6)

    def test_corrupted_cost(self):
        """Test a label cost that disagrees with its arcs"""
        corrupted = Label(1, Direction.FORWARD, 99.0, (1,), 0b11, predecessor=self.fw.predecessor)
        with self.assertRaises(DecodeMismatch):
            extract_path(corrupted, self.bw, self.problem)

    def test_not_adjacent(self):
        """Test labels without an arc between them"""
        with self.assertRaises(DecodeMismatch):
            extract_path(self.fw, self.fw, self.problem)

    def test_wrong_endpoints(self):
        """Test a forward label that never reached the destination"""
        with self.assertRaises(DecodeMismatch):
            extract_path(self.fw, None, self.problem)


class RelaxationPropertyTest(SimpleTestCase):
    """Test suite for properties of the relaxation loop on random instances"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.suite = []
        for seed in range(12):
            problem = random_problem(seed, 5 + seed % 6, negative_fraction=0.3)
            cls.suite.append((problem, enumerate_paths(problem)))

    def test_ngc_fixpoint_matches_ng(self):
        """Test the grown neighbourhoods reach the static neighbourhood optimum"""
        for problem, _ in self.suite:
            for ng_size in (2, 4):
                with self.subTest(problem=str(problem), ng_size=ng_size):
                    grown, _ = solve(problem, cyclic(relaxation='ngc', ng_size=ng_size))
                    static, _ = solve(problem, cyclic(relaxation='ng', ng_size=ng_size))
                    self.assertEqual(grown.found, static.found)
                    if static.found:
                        self.assertAlmostEqual(grown.cost, static.cost, delta=1e-6)

    def test_relaxed_costs_climb_to_optimum(self):
        """Test relaxed costs never decrease and never pass the optimum"""
        for problem, expected in self.suite:
            if not expected.feasible:
                continue
            for scheme in ELEMENTARY_SCHEMES:
                with self.subTest(problem=str(problem), scheme=scheme):
                    _, stats = solve(problem, cyclic(relaxation=scheme))
                    costs = [cost for cost in stats.relaxed_costs if cost is not None]
                    self.assertTrue(costs)
                    for earlier, later in zip(costs, costs[1:]):
                        self.assertLessEqual(earlier, later + 1e-6)
                    for cost in costs:
                        self.assertLessEqual(cost, expected.optimal_cost + 1e-6)

    def test_telemetry_does_not_change_path(self):
        """Test the same path comes back with telemetry on and off"""
        for problem, _ in self.suite:
            with self.subTest(problem=str(problem)):
                on, _ = solve(problem, cyclic(telemetry=True), Counters(enabled=True))
                off, _ = solve(problem, cyclic(telemetry=False), Counters(enabled=False))
                self.assertEqual(on, off)

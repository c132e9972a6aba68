import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from graphs.models import ArcMap, StorageMode
from graphs.services import build_graph
from pathwise.exceptions import InconsistentData, ParseError, UnknownNode
from problems import samples
from problems.models import CyclicityClass, Problem
from problems.parsers import load_dimacs, load_native, load_pc, parse_native, write_native
from problems.services import (
    classify_cyclicity, has_negative_cycle, resource_free_cycle_nodes, validate,
)
from resources.kinds import Capacity
from resources.models import ResourceData, ResourceKind

T4_NATIVE = """\
# canonical four node instance
NAME t4
NODES 4
SOURCE 0
DEST 3
ARCS
0 1 1
0 2 4
0 3 10
1 2 1
1 3 5
2 3 1
RESOURCE CAPACITY 0 2
NODE 1 1
NODE 2 1
CRITICAL 0
"""

PC_NATIVE = """\
NODES 3
SOURCE 0
DEST 2
ARCS
0 1 -4 1.5
1 2 -3 2
0 2 -1 4
RESOURCE CAPACITY 0 10
NODE 1 3
RESOURCE CAPACITY 0 12
NODE 1 5
RESOURCE NODELIMIT 0 3
RESOURCE TIMEWINDOWS 0 100
TW 0 0 100 0
TW 1 10 50 10
TW 2 0 100 0
"""


class FileMixin:
    """Writes instance text to a temporary directory"""

    def setUp(self):
        super().setUp()
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, name, text):
        path = Path(self.tmp.name) / name
        path.write_text(text)
        return path


class NativeFormatTest(FileMixin, SimpleTestCase):
    """Test suite for the native instance grammar"""

    def test_t4_matches_sample(self):
        """Test the T4 file loads to the in-memory T4"""
        problem = load_native(self.write('t4.rcsp', T4_NATIVE))
        self.assertEqual(problem.n, 4)
        self.assertEqual(len(problem.resources), 1)
        self.assertEqual(problem, samples.t4())

    def test_round_trip(self):
        """Test writing then reading yields an identical problem"""
        problem = parse_native(T4_NATIVE)
        again = parse_native(write_native(problem))
        self.assertEqual(again, problem)
        self.assertEqual(write_native(again), write_native(problem))

    def test_round_trip_with_time_windows_and_coordinates(self):
        """Test round trip of a multi-resource instance with coordinates"""
        text = PC_NATIVE + 'COORD 0 0 0\nCOORD 1 3.5 4\nCOORD 2 10 0.25\n'
        problem = parse_native(text)
        self.assertEqual(problem.graph.coordinates[1], (3.5, 4.0))
        self.assertEqual(parse_native(write_native(problem)), problem)

    def test_time_column_feeds_time_windows(self):
        """Test time resources default to the ARCS time column"""
        problem = parse_native(PC_NATIVE)
        windows = problem.resources[3]
        self.assertEqual(windows.kind, ResourceKind.TIME_WINDOWS)
        self.assertEqual(windows.data.arc(0, 1), 1.5)
        self.assertEqual(windows.data.service_time(1), 10)

    def test_duplicate_singleton_resource(self):
        """Test that a second node limit section is rejected"""
        text = T4_NATIVE + 'RESOURCE NODELIMIT 0 4\nRESOURCE NODELIMIT 0 5\n'
        with self.assertRaises(InconsistentData):
            parse_native(text)

    def test_negative_bound(self):
        """Test that a negative capacity bound is a parse error"""
        text = T4_NATIVE.replace('RESOURCE CAPACITY 0 2', 'RESOURCE CAPACITY 0 -2')
        with self.assertRaises(ParseError) as ctx:
            parse_native(text, path='bad.rcsp')
        self.assertEqual(ctx.exception.line, 13)
        self.assertIn('bad.rcsp:13:', str(ctx.exception))

    def test_unknown_node_consumption(self):
        """Test that a demand for an unknown node is inconsistent"""
        with self.assertRaises(InconsistentData) as ctx:
            parse_native(T4_NATIVE + 'RESOURCE NODELIMIT 0 4\nNODE 9 1\n')
        self.assertIn('line 18', str(ctx.exception))

    def test_unknown_arc_consumption(self):
        """Test that consumption on a missing arc is inconsistent"""
        with self.assertRaises(InconsistentData):
            parse_native(T4_NATIVE.replace('NODE 2 1', 'NODE 2 1\nARC 3 0 1'))

    def test_bad_number_reports_column(self):
        """Test the column of a malformed token"""
        with self.assertRaises(ParseError) as ctx:
            parse_native(T4_NATIVE.replace('1 2 1\n', '1 2 x\n'))
        self.assertEqual(ctx.exception.line, 10)
        self.assertEqual(ctx.exception.column, 5)

    def test_missing_header(self):
        """Test that NODES is required"""
        with self.assertRaises(ParseError):
            parse_native(T4_NATIVE.replace('NODES 4\n', ''))

    def test_missing_resources(self):
        """Test that at least one resource is required"""
        with self.assertRaises(InconsistentData):
            parse_native(T4_NATIVE.split('RESOURCE')[0])

    def test_duplicate_arcs_keep_cheapest(self):
        """Test duplicate arcs collapse to the minimum cost"""
        problem = parse_native(T4_NATIVE.replace('ARCS\n', 'ARCS\n0 1 7\n'))
        self.assertEqual(problem.arc_cost(0, 1), 1)
        self.assertEqual(len(problem.warnings), 1)

    def test_storage_override(self):
        """Test loading into sparse storage"""
        problem = parse_native(T4_NATIVE, storage='sparse')
        self.assertEqual(problem.graph.storage_mode, StorageMode.SPARSE_MAP)
        self.assertEqual(problem, samples.t4())

    def test_storage_thresholds(self):
        """Test the automatic storage thresholds reach the graph"""
        sparse = parse_native(T4_NATIVE, storage='auto', density_threshold=0.9, small_n_threshold=0)
        self.assertEqual(sparse.graph.storage_mode, StorageMode.SPARSE_MAP)
        dense = parse_native(T4_NATIVE, storage='auto', density_threshold=0.3, small_n_threshold=0)
        self.assertEqual(dense.graph.storage_mode, StorageMode.DENSE_BITS)


class PrizeCollectingFormatTest(FileMixin, SimpleTestCase):
    """Test suite for load_pc"""

    def test_four_resources(self):
        """Test a complete PC file"""
        problem = load_pc(self.write('pc.rcsp', PC_NATIVE))
        self.assertEqual(len(problem.resources), 4)
        self.assertEqual(problem.critical, 0)
        self.assertEqual(problem.warnings, [])

    def test_missing_time_windows(self):
        """Test that a PC file without windows is rejected"""
        text = PC_NATIVE.split('RESOURCE TIMEWINDOWS')[0]
        with self.assertRaises(InconsistentData):
            load_pc(self.write('pc.rcsp', text))

    def test_non_negative_cost_warning(self):
        """Test a warning for non-negative prize collecting costs"""
        problem = load_pc(self.write('pc.rcsp', PC_NATIVE.replace('0 2 -1 4', '0 2 1 4')))
        self.assertEqual(len(problem.warnings), 1)


class DimacsFormatTest(FileMixin, SimpleTestCase):
    """Test suite for load_dimacs"""

    TEN_NODES = """\
c hand written toy network
p sp 10 14
a 1 2 4
a 2 3 4
a 3 10 4
a 1 4 2
a 4 5 2
a 5 6 2
a 6 10 9
a 1 7 1
a 7 8 1
a 8 9 1
a 9 10 30
a 2 3 6
a 4 4 1
a 5 6 1
"""

    def test_toy_file(self):
        """Test the two node file"""
        path = self.write('toy.gr', 'p sp 2 1\na 1 2 7\n')
        problem = load_dimacs(path, 0, 1, 100)
        self.assertEqual(problem.n, 2)
        self.assertEqual(problem.arc_cost(0, 1), 7)
        self.assertEqual(problem.resources[0].kind, ResourceKind.TIME)
        self.assertEqual(problem.resources[0].data.arc(0, 1), 7)

    def test_self_loop_dropped(self):
        """Test that self-loops are dropped with a warning"""
        path = self.write('loop.gr', 'p sp 2 2\na 1 1 5\na 1 2 3\n')
        problem = load_dimacs(path, 0, 1, 100)
        self.assertEqual(problem.graph.arc_count, 1)
        self.assertEqual(len(problem.warnings), 1)

    def test_ten_nodes_counts(self):
        """Test duplicate collapse and self-loop removal on ten nodes"""
        problem = load_dimacs(self.write('ten.gr', self.TEN_NODES), 0, 9, 100)
        self.assertEqual(problem.n, 10)
        self.assertEqual(problem.graph.arc_count, 11)
        self.assertEqual(problem.arc_cost(1, 2), 4)
        self.assertEqual(problem.arc_cost(4, 5), 1)

    def test_time_file_and_divisor(self):
        """Test separate time weights and the divisor fallback"""
        path = self.write('toy.gr', 'p sp 2 1\na 1 2 7\n')
        times = self.write('toy.time.gr', 'p sp 2 1\na 1 2 3\n')
        self.assertEqual(load_dimacs(path, 0, 1, 10, time_path=times).resources[0].data.arc(0, 1), 3)
        self.assertEqual(load_dimacs(path, 0, 1, 10, divisor=2).resources[0].data.arc(0, 1), 3.5)

    def test_coordinates(self):
        """Test reading a coordinate file"""
        path = self.write('toy.gr', 'p sp 2 1\na 1 2 7\n')
        coords = self.write('toy.co', 'p aux sp co 2\nv 1 10 20\nv 2 30 40\n')
        problem = load_dimacs(path, 0, 1, 10, co_path=coords)
        self.assertEqual(problem.graph.coordinates, ((10.0, 20.0), (30.0, 40.0)))

    def test_unknown_source(self):
        """Test source outside the node range"""
        path = self.write('toy.gr', 'p sp 2 1\na 1 2 7\n')
        with self.assertRaises(UnknownNode):
            load_dimacs(path, 0, 5, 10)

    def test_malformed_header(self):
        """Test a missing problem line"""
        path = self.write('bad.gr', 'a 1 2 7\n')
        with self.assertRaises(ParseError):
            load_dimacs(path, 0, 1, 10)

    def test_acyclic(self):
        """Test DIMACS instances are acyclic"""
        problem = load_dimacs(self.write('ten.gr', self.TEN_NODES), 0, 9, 100)
        self.assertEqual(classify_cyclicity(problem), CyclicityClass.ACYCLIC)


class ProblemServicesTest(SimpleTestCase):
    """Test suite for classification and validation"""

    def test_t4_acyclic(self):
        """Test all positive costs"""
        self.assertEqual(classify_cyclicity(samples.t4()), CyclicityClass.ACYCLIC)
        self.assertFalse(has_negative_cycle(samples.t4()))

    def test_negative_arc_is_cyclic(self):
        """Test the conservative rule"""
        problem = samples.t4()
        problem.cost.set(1, 2, -1)
        self.assertEqual(classify_cyclicity(problem), CyclicityClass.CYCLIC)
        self.assertFalse(has_negative_cycle(problem))

    def test_negative_cycle(self):
        """Test exact negative cycle detection"""
        self.assertTrue(has_negative_cycle(samples.t3neg()))

    def test_resource_free_cycles(self):
        """Test nodes on cycles consuming nothing are found"""
        self.assertEqual(resource_free_cycle_nodes(samples.t4_cycle()), set())

        costs = {(0, 1): -1, (1, 2): -5, (2, 1): -5, (2, 3): -1}
        graph = build_graph(4, costs.keys(), 0, 3)
        cost = ArcMap.from_items(4, graph.storage_mode, costs.items())
        capacity = Capacity(ResourceData(upper_bound=5, node_consumption=[0, 0, 0, 0]))
        problem = Problem(graph, cost, [capacity])
        self.assertEqual(resource_free_cycle_nodes(problem), {1, 2})

    def test_with_storage(self):
        """Test converting storage keeps the instance"""
        problem = samples.t4()
        sparse = problem.with_storage(StorageMode.SPARSE_MAP)
        self.assertEqual(sparse.graph.storage_mode, StorageMode.SPARSE_MAP)
        self.assertEqual(sparse, problem)
        self.assertIs(sparse.with_storage(StorageMode.SPARSE_MAP), sparse)

    def test_validate_missing_cost(self):
        """Test that an arc without cost is inconsistent"""
        graph = build_graph(3, [(0, 1), (1, 2)], 0, 2)
        cost = ArcMap.from_items(3, graph.storage_mode, [((0, 1), 1)])
        capacity = Capacity(ResourceData(upper_bound=5))
        with self.assertRaises(InconsistentData):
            validate(Problem(graph, cost, [capacity]))

    def test_critical_index_checked(self):
        """Test that the critical index must name a resource"""
        problem = samples.t4()
        with self.assertRaises(InconsistentData):
            Problem(problem.graph, problem.cost, problem.resources, critical=3)

    def test_tour_cost(self):
        """Test summing arc costs"""
        self.assertEqual(samples.t4().tour_cost([0, 1, 2, 3]), 3)

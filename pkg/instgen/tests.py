import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from instgen.models import SERVICE_TIMES, PcGenSpec
from instgen.services import (
    generate, load_coordinates, random_problem, random_sparse_problem, sample_windows,
)
from pathwise.exceptions import ConfigError, ParseError
from problems.models import CyclicityClass
from problems.parsers import load_pc, write_native
from problems.services import classify_cyclicity, validate
from resources.models import ResourceKind


class SampleWindowsTest(SimpleTestCase):
    """Test suite for the window sampler"""

    def setUp(self):
        self.opens, self.closes, self.wide = sample_windows(np.random.default_rng(7), 10000, 0.8)

    def test_wide_fraction(self):
        """Test the share of wide windows"""
        self.assertTrue(0.78 <= self.wide.mean() <= 0.82)

    def test_lengths(self):
        """Test wide and narrow window lengths"""
        lengths = self.closes - self.opens
        self.assertTrue(np.all(lengths[self.wide] >= 100) and np.all(lengths[self.wide] <= 400))
        self.assertTrue(np.all(lengths[~self.wide] >= 10) and np.all(lengths[~self.wide] <= 60))

    def test_openings(self):
        """Test openings fall in (0, 1000)"""
        self.assertTrue(np.all(self.opens >= 0) and np.all(self.opens < 1000))


class GenerateTest(SimpleTestCase):
    """Test suite for prize collecting generation"""

    def setUp(self):
        self.spec = PcGenSpec(n=20, C=25, NL=8, seed=1)
        self.problem = generate(self.spec)

    def test_shape(self):
        """Test the depot split and the resource list"""
        problem = self.problem
        self.assertEqual(problem.n, 21)
        self.assertEqual(problem.source, 0)
        self.assertEqual(problem.destination, 20)
        self.assertFalse(problem.graph.has_arc(0, 20))
        self.assertFalse(problem.graph.has_arc(3, 0))
        self.assertFalse(problem.graph.has_arc(20, 3))
        self.assertTrue(problem.graph.has_arc(3, 20))
        self.assertEqual(
            [r.kind for r in problem.resources],
            [ResourceKind.CAPACITY, ResourceKind.CAPACITY, ResourceKind.NODE_LIMIT, ResourceKind.TIME_WINDOWS],
        )
        self.assertEqual(problem.critical, 0)
        self.assertEqual(problem.name, 'pc-n20-C25-NL8-s1')

    def test_costs_negative(self):
        """Test every arc pays a prize"""
        self.assertTrue(all(value < 0 for _, value in self.problem.cost.items()))
        self.assertEqual(classify_cyclicity(self.problem), CyclicityClass.CYCLIC)
        validate(self.problem)

    def test_bounds(self):
        """Test capacity and node limit bounds"""
        capacity_1, capacity_2, node_limit, _ = self.problem.resources
        self.assertEqual(capacity_1.data.upper_bound, 25)
        self.assertTrue(20 <= capacity_2.data.upper_bound <= 30)
        self.assertEqual(node_limit.data.upper_bound, 8)
        for resource in (capacity_1, capacity_2):
            demands = resource.data.node_consumption
            self.assertEqual(demands[0], 0)
            self.assertEqual(demands[20], 0)
            self.assertTrue(all(1 <= d <= 10 for d in demands[1:20]))

    def test_windows_leave_room_for_service(self):
        """Test close - open covers the service time of every customer"""
        windows = self.problem.resources[3]
        for node in range(1, 20):
            open_, close = windows.data.windows[node]
            service = windows.data.service_time(node)
            self.assertIn(service, SERVICE_TIMES)
            self.assertGreaterEqual(close - open_, service)
            self.assertLessEqual(close, open_ + max(400, service))

    def test_times_from_distances(self):
        """Test arc times are distances divided by 100"""
        windows = self.problem.resources[3]
        for (i, j), value in self.problem.cost.items():
            self.assertAlmostEqual(windows.data.arc(i, j), -value / 100.0)

    def test_deterministic(self):
        """Test the same seed gives the same file"""
        self.assertEqual(write_native(generate(self.spec)), write_native(self.problem))
        other = generate(PcGenSpec(n=20, C=25, NL=8, seed=2))
        self.assertNotEqual(write_native(other), write_native(self.problem))

    def test_loads_as_prize_collecting(self):
        """Test a generated file reads back through load_pc"""
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'pc.txt'
            path.write_text(write_native(self.problem))
            loaded = load_pc(path)
        self.assertEqual(len(loaded.resources), 4)
        self.assertEqual(loaded.resources[2].data.upper_bound, 8)
        self.assertEqual(loaded.critical, 0)
        self.assertEqual(loaded.warnings, [])
        self.assertEqual(loaded, self.problem)

    def test_invalid_spec(self):
        """Test spec validation"""
        with self.assertRaises(ConfigError) as raised:
            generate(PcGenSpec(n=5, base_coordinates=[(0, 0)] * 3))
        self.assertEqual(raised.exception.key, 'n')
        with self.assertRaises(ConfigError):
            generate(PcGenSpec(n=5, wide_tw_fraction=1.5))


class CoordinateFileTest(SimpleTestCase):
    """Test suite for base coordinate files"""

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def write(self, text):
        path = Path(self.directory.name) / 'coords.txt'
        path.write_text(text)
        return path

    def test_base_demands(self):
        """Test demands from the file feed the first capacity"""
        path = self.write('# depot\n0 0\n10 0 4\n0 10 6\n10 10 2\n')
        rows = load_coordinates(path)
        self.assertEqual(rows[1], (10.0, 0.0, 4.0))
        problem = generate(PcGenSpec(n=4, C=25, NL=8, seed=3, base_coordinates=rows))
        self.assertEqual(problem.resources[0].data.node_consumption[1:4], [4.0, 6.0, 2.0])
        self.assertEqual(problem.arc_cost(1, 2), -14)
        self.assertEqual(problem.graph.coordinates[4], (0.0, 0.0))

    def test_bad_row(self):
        """Test a malformed row reports its line"""
        with self.assertRaises(ParseError) as raised:
            load_coordinates(self.write('0 0\n1\n'))
        self.assertEqual(raised.exception.line, 2)


class RandomFamiliesTest(SimpleTestCase):
    """Test suite for the random oracle families"""

    def test_random_problem(self):
        """Test the complete random family"""
        problem = random_problem(5, 6, negative_fraction=1.0)
        self.assertEqual(problem.n, 6)
        self.assertEqual(problem.graph.arc_count, 5 + 4 * 4)
        self.assertTrue(all(value < 0 for _, value in problem.cost.items()))
        self.assertEqual(problem.graph.in_neighbors(0), ())

    def test_random_sparse_problem(self):
        """Test the sparse family is acyclic with a chain"""
        problem = random_sparse_problem(4, 8)
        for i in range(7):
            self.assertTrue(problem.graph.has_arc(i, i + 1))
        self.assertTrue(all(i < j for i, j in problem.graph.arcs()))
        self.assertEqual(classify_cyclicity(problem), CyclicityClass.ACYCLIC)

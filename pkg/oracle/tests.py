from django.test import SimpleTestCase

from graphs.models import ArcMap
from graphs.services import build_graph
from oracle.services import enumerate_paths
from pathwise.exceptions import TooLarge
from problems import samples
from problems.models import Problem
from resources.kinds import Capacity
from resources.models import ResourceData


class OracleTest(SimpleTestCase):
    """Test suite for enumerate_paths"""

    def test_t4(self):
        """Test the T4 optimum"""
        result = enumerate_paths(samples.t4())
        self.assertEqual(result.optimal_cost, 3)
        self.assertEqual(result.optimal_tour, [0, 1, 2, 3])
        self.assertEqual(result.paths_enumerated, 4)

    def test_t4_tight_capacity(self):
        """Test T4 with room for one demand only"""
        result = enumerate_paths(samples.t4(capacity=1))
        self.assertEqual(result.optimal_cost, 5)
        self.assertEqual(result.optimal_tour, [0, 2, 3])

    def test_t3neg(self):
        """Test the negative three node instance"""
        result = enumerate_paths(samples.t3neg())
        self.assertEqual(result.optimal_cost, -10)
        self.assertEqual(result.optimal_tour, [0, 1, 2])

    def test_t4_cycle(self):
        """Test the elementary optimum despite the negative cycle"""
        result = enumerate_paths(samples.t4_cycle())
        self.assertEqual(result.optimal_cost, -7)
        self.assertEqual(result.optimal_tour, [0, 1, 2, 3])

    def test_disconnected(self):
        """Test a graph without an s-d path"""
        graph = build_graph(3, [(0, 1)], 0, 2)
        cost = ArcMap.from_items(3, graph.storage_mode, [((0, 1), 1)])
        problem = Problem(graph, cost, [Capacity(ResourceData(upper_bound=1))])
        result = enumerate_paths(problem)
        self.assertIsNone(result.optimal_cost)
        self.assertFalse(result.feasible)

    def test_lower_bound(self):
        """Test that complete paths must meet lower bounds"""
        problem = samples.t4()
        problem.resources[0].data.lower_bound = 2
        result = enumerate_paths(problem)
        self.assertEqual(result.optimal_tour, [0, 1, 2, 3])
        problem.resources[0].data.lower_bound = 3
        self.assertFalse(enumerate_paths(problem).feasible)

    def test_too_large(self):
        """Test the node cap"""
        with self.assertRaises(TooLarge):
            enumerate_paths(samples.t4(), node_cap=3)

import random

from django.test import SimpleTestCase, override_settings

from graphs.models import ArcMap, StorageMode
from graphs.services import build_graph, choose_storage_mode, rebuild_graph
from pathwise.exceptions import EmptyGraph, GraphError, InvalidArc

T4_ARCS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


class GraphConstructionTest(SimpleTestCase):
    """Test suite for build_graph"""

    def test_path_graph(self):
        """Test a small chain graph"""
        graph = build_graph(4, [(0, 1), (1, 2), (2, 3)], 0, 3)
        self.assertEqual(graph.out_neighbors(1), (2,))
        self.assertEqual(graph.arc_count, 3)

    def test_graph_without_arcs(self):
        """Test that an arc-free two node graph is accepted"""
        graph = build_graph(2, [], 0, 1)
        self.assertEqual(graph.arc_count, 0)
        self.assertEqual(graph.out_neighbors(0), ())

    def test_complete_digraph_is_dense(self):
        """Test the density rule on a complete digraph"""
        arcs = [(i, j) for i in range(4) for j in range(4) if i != j]
        self.assertEqual(len(arcs), 12)
        mode = choose_storage_mode(4, 12, density_threshold=0.25, small_n_threshold=0)
        self.assertEqual(mode, StorageMode.DENSE_BITS)
        self.assertEqual(build_graph(4, arcs, 0, 3).storage_mode, StorageMode.DENSE_BITS)

    def test_large_sparse_graph_is_sparse(self):
        """Test that a large chain falls back to sparse maps"""
        n = 2000
        arcs = [(i, i + 1) for i in range(n - 1)]
        graph = build_graph(n, arcs, 0, n - 1)
        self.assertEqual(graph.storage_mode, StorageMode.SPARSE_MAP)

    @override_settings(PATHWISE={'density_threshold': 0.25, 'small_n_threshold': 2})
    def test_thresholds_come_from_settings(self):
        """Test that the defaults are read from settings"""
        graph = build_graph(4, [(0, 1), (1, 2), (2, 3)], 0, 3)
        self.assertEqual(graph.storage_mode, StorageMode.SPARSE_MAP)

    def test_mode_override(self):
        """Test an explicit storage override"""
        graph = build_graph(4, T4_ARCS, 0, 3, mode='sparse')
        self.assertEqual(graph.storage_mode, StorageMode.SPARSE_MAP)

    def test_duplicate_arcs_collapse(self):
        """Test that parallel arcs become one arc"""
        graph = build_graph(3, [(0, 1), (0, 1), (1, 2)], 0, 2)
        self.assertEqual(graph.arc_count, 2)

    def test_self_loop_rejected(self):
        """Test that self-loops raise InvalidArc"""
        with self.assertRaises(InvalidArc):
            build_graph(3, [(1, 1)], 0, 2)

    def test_out_of_range_rejected(self):
        """Test that unknown endpoints raise InvalidArc"""
        with self.assertRaises(InvalidArc):
            build_graph(3, [(0, 3)], 0, 2)

    def test_too_small_rejected(self):
        """Test that a one node graph raises EmptyGraph"""
        with self.assertRaises(EmptyGraph):
            build_graph(1, [], 0, 0)

    def test_source_equals_destination_rejected(self):
        """Test that source and destination must differ"""
        with self.assertRaises(GraphError):
            build_graph(3, [(0, 1)], 1, 1)


class GraphQueryTest(SimpleTestCase):
    """Test suite for adjacency queries"""

    def setUp(self):
        self.graph = build_graph(4, T4_ARCS, 0, 3)

    def test_has_arc(self):
        """Test arc membership"""
        self.assertTrue(self.graph.has_arc(0, 1))
        self.assertFalse(self.graph.has_arc(1, 0))

    def test_neighbors(self):
        """Test ordered neighbour lists"""
        self.assertEqual(self.graph.out_neighbors(0), (1, 2, 3))
        self.assertEqual(self.graph.in_neighbors(3), (0, 1, 2))
        self.assertEqual(self.graph.in_neighbors(0), ())

    def test_isolated_node(self):
        """Test that an isolated node has no neighbours"""
        graph = build_graph(5, T4_ARCS, 0, 3)
        self.assertEqual(graph.out_neighbors(4), ())
        self.assertEqual(graph.in_neighbors(4), ())

    def test_cross_mode_equivalence(self):
        """Test that dense and sparse modes agree on random graphs"""
        rng = random.Random(11)
        for _ in range(20):
            n = rng.randint(2, 64)
            arcs = [(i, j) for i in range(n) for j in range(n) if i != j and rng.random() < 0.2]
            dense = build_graph(n, arcs, 0, n - 1, mode=StorageMode.DENSE_BITS)
            sparse = build_graph(n, arcs, 0, n - 1, mode=StorageMode.SPARSE_MAP)
            for i in range(n):
                self.assertEqual(dense.out_neighbors(i), sparse.out_neighbors(i))
                self.assertEqual(dense.in_neighbors(i), sparse.in_neighbors(i))
                for j in range(n):
                    self.assertEqual(dense.has_arc(i, j), sparse.has_arc(i, j))
                    self.assertEqual(dense.has_arc(i, j), j in dense.out_neighbors(i))
                    self.assertEqual(dense.has_arc(i, j), i in dense.in_neighbors(j))

    def test_neighbor_lists_sorted_and_unique(self):
        """Test that neighbour lists are sorted and duplicate free"""
        graph = build_graph(6, [(0, 5), (0, 2), (0, 2), (0, 4), (3, 0)], 0, 5, mode='sparse')
        self.assertEqual(graph.out_neighbors(0), (2, 4, 5))

    def test_rebuild_keeps_topology(self):
        """Test switching storage mode"""
        sparse = rebuild_graph(self.graph, StorageMode.SPARSE_MAP)
        self.assertEqual(list(sparse.arcs()), list(self.graph.arcs()))


class ArcMapTest(SimpleTestCase):
    """Test suite for ArcMap"""

    def test_dense_and_sparse_agree(self):
        """Test get, contains and items in both modes"""
        items = [((0, 1), 1.5), ((2, 0), -3.0)]
        for mode in StorageMode:
            arc_map = ArcMap.from_items(3, mode, items)
            self.assertEqual(arc_map.get(0, 1), 1.5)
            self.assertEqual(arc_map.get(1, 0), 0.0)
            self.assertIn((2, 0), arc_map)
            self.assertNotIn((1, 2), arc_map)
            self.assertEqual(list(arc_map.items()), sorted(items))

    def test_conversion_equality(self):
        """Test that converted maps compare equal"""
        arc_map = ArcMap.from_items(3, 'dense', [((0, 1), 2.0)])
        self.assertEqual(arc_map, arc_map.converted('sparse'))

from django.test import SimpleTestCase

from graphs.models import ArcMap
from graphs.services import build_graph
from pathwise.exceptions import InvalidNgSize, NonTerminating
from problems import samples
from problems.models import Problem
from relaxations.models import NeighborhoodMasks, Scheme, StepOutcome
from relaxations.services import (
    detect_cycles, init_masks, ng_distances, ng_neighborhoods, relaxation_step, update_masks,
)
from resources.kinds import Capacity
from resources.models import ResourceData

# 5 revisits 6, 8 and 9; 6 revisits 8
CYCLIC_TOUR = [0, 5, 6, 8, 6, 9, 5, 3]
ALL = (1 << 10) - 1


def self_only(n=10):
    return [1 << k for k in range(n)]


def nodes_with(masks, bit):
    return [k for k, mask in enumerate(masks) if mask >> bit & 1]


def line_problem():
    """Five nodes on a line at x = 0, 1, 3, 6, 10."""
    xs = [0, 1, 3, 6, 10]
    arcs = [(i, j) for i in range(5) for j in range(5) if i != j]
    graph = build_graph(5, arcs, 0, 4, coordinates=[(x, 0) for x in xs])
    cost = ArcMap.from_items(5, graph.storage_mode, ((arc, 1) for arc in arcs))
    capacity = Capacity(ResourceData(upper_bound=5, node_consumption=[0, 1, 1, 1, 0]))
    return Problem(graph, cost, [capacity], name='line')


class CycleDetectionTest(SimpleTestCase):
    """Test suite for detect_cycles"""

    def test_repeated_nodes_and_spans(self):
        """Test spans run from first to last visit"""
        report = detect_cycles(CYCLIC_TOUR)
        self.assertEqual(report.repeated_nodes, [5, 6])
        self.assertEqual(report.loop_spans[5], [5, 6, 8, 6, 9, 5])
        self.assertEqual(report.loop_spans[6], [6, 8, 6])
        self.assertFalse(report.is_elementary)

    def test_elementary(self):
        """Test an elementary tour"""
        self.assertTrue(detect_cycles([0, 1, 2, 3]).is_elementary)


class NeighborhoodTest(SimpleTestCase):
    """Test suite for NG neighbourhoods and initial masks"""

    def test_euclidean_distances(self):
        """Test coordinates give Euclidean distances"""
        distances = ng_distances(line_problem())
        self.assertEqual(distances[1, 3], 5)
        self.assertEqual(distances[4, 0], 10)

    def test_cost_distances(self):
        """Test absolute arc costs stand in without coordinates"""
        distances = ng_distances(samples.t3neg())
        self.assertEqual(distances[1, 2], 5)
        self.assertEqual(distances[0, 2], float('inf'))

    def test_nearest_nodes(self):
        """Test ties are broken by node id"""
        neighborhoods = ng_neighborhoods(line_problem(), 2)
        self.assertEqual(neighborhoods[0], 0b00111)
        self.assertEqual(neighborhoods[2], 0b00111)
        self.assertEqual(neighborhoods[4], 0b11100)

    def test_cost_neighbourhoods(self):
        """Test neighbourhoods from T4 costs"""
        neighborhoods = ng_neighborhoods(samples.t4(), 1)
        self.assertEqual(neighborhoods[0], 0b0011)
        self.assertEqual(neighborhoods[3], 0b1100)

    def test_init_masks(self):
        """Test the starting masks of each scheme"""
        problem = line_problem()
        for scheme in (Scheme.DSSR, Scheme.DSSRC):
            self.assertEqual(init_masks(scheme, problem, 2).masks, self_only(5))
        ng = init_masks(Scheme.NG, problem, 2)
        self.assertEqual(ng.masks, ng_neighborhoods(problem, 2))
        ngc = init_masks(Scheme.NGC, problem, 2)
        self.assertEqual(ngc.masks, self_only(5))
        self.assertEqual(ngc.ng_base, ng_neighborhoods(problem, 2))

    def test_full_neighbourhood_is_elementary(self):
        """Test ng_size n - 1 covers every node"""
        masks = init_masks(Scheme.NG, line_problem(), 4)
        self.assertEqual(masks.masks, [0b11111] * 5)

    def test_invalid_ng_size(self):
        """Test sizes outside [1, n]"""
        with self.assertRaises(InvalidNgSize):
            init_masks(Scheme.NG, samples.t4(), 0)
        with self.assertRaises(InvalidNgSize):
            init_masks(Scheme.NGC_DSSRC, samples.t4(), 5)
        init_masks(Scheme.DSSR, samples.t4(), 0)

    def test_seed(self):
        """Test seeded nodes become elementary everywhere"""
        masks = NeighborhoodMasks(Scheme.NGC, self_only(4))
        masks.seed([1, 2])
        self.assertEqual(masks.masks, [0b0111, 0b0110, 0b0110, 0b1110])
        self.assertTrue(masks.contains(0, 2))
        self.assertEqual(masks.size(3), 3)


class MaskUpdateTest(SimpleTestCase):
    """Test suite for update_masks"""

    def test_dssr(self):
        """Test repeated nodes enter every mask"""
        masks, changed = update_masks(NeighborhoodMasks(Scheme.DSSR, self_only()), detect_cycles(CYCLIC_TOUR))
        self.assertTrue(changed)
        self.assertEqual(nodes_with(masks, 5), list(range(10)))
        self.assertEqual(nodes_with(masks, 6), list(range(10)))

    def test_dssrc(self):
        """Test repeated nodes enter the masks of their loop"""
        masks, _ = update_masks(NeighborhoodMasks(Scheme.DSSRC, self_only()), detect_cycles(CYCLIC_TOUR))
        self.assertEqual(nodes_with(masks, 5), [5, 6, 8, 9])
        self.assertEqual(nodes_with(masks, 6), [6, 8])
        self.assertEqual(nodes_with(masks, 0), [0])

    def test_ngc(self):
        """Test growth stops outside the NG neighbourhoods"""
        base = [ALL] * 10
        base[8] = ALL & ~(1 << 5)
        masks, _ = update_masks(NeighborhoodMasks(Scheme.NGC, self_only(), base), detect_cycles(CYCLIC_TOUR))
        self.assertEqual(nodes_with(masks, 5), [5, 6, 9])
        self.assertEqual(nodes_with(masks, 6), [6, 8])

    def test_ng_never_changes(self):
        """Test NG masks are static"""
        _, changed = update_masks(NeighborhoodMasks(Scheme.NG, self_only()), detect_cycles(CYCLIC_TOUR))
        self.assertFalse(changed)

    def test_only_grows(self):
        """Test a second update is a no-op"""
        masks = NeighborhoodMasks(Scheme.DSSRC, self_only())
        report = detect_cycles(CYCLIC_TOUR)
        update_masks(masks, report)
        before = list(masks.masks)
        _, changed = update_masks(masks, report)
        self.assertFalse(changed)
        self.assertEqual(masks.masks, before)


class RelaxationStepTest(SimpleTestCase):
    """Test suite for relaxation_step"""

    def test_elementary_is_done(self):
        """Test every scheme stops on an elementary tour"""
        for scheme in Scheme:
            masks = NeighborhoodMasks(scheme, self_only(), [ALL] * 10)
            self.assertEqual(relaxation_step(masks, [0, 1, 2, 3]), StepOutcome.DONE)

    def test_dssr_repeats(self):
        """Test DSSR repeats until the masks cannot grow"""
        masks = NeighborhoodMasks(Scheme.DSSR, self_only())
        self.assertEqual(relaxation_step(masks, CYCLIC_TOUR), StepOutcome.REPEAT)
        self.assertEqual(masks.iteration, 1)
        with self.assertRaises(NonTerminating):
            relaxation_step(masks, CYCLIC_TOUR)

    def test_ng_stops(self):
        """Test NG accepts a cyclic optimum"""
        masks = NeighborhoodMasks(Scheme.NG, self_only())
        self.assertEqual(relaxation_step(masks, CYCLIC_TOUR), StepOutcome.DONE)

    def test_ngc_fixpoint(self):
        """Test NGC repeats then stops at its fixpoint"""
        base = [ALL] * 10
        base[8] = ALL & ~(1 << 5)
        masks = NeighborhoodMasks(Scheme.NGC, self_only(), base)
        self.assertEqual(relaxation_step(masks, CYCLIC_TOUR), StepOutcome.REPEAT)
        self.assertEqual(relaxation_step(masks, CYCLIC_TOUR), StepOutcome.DONE)
        self.assertFalse(masks.handed_off)

    def test_ngc_dssrc_hands_off(self):
        """Test the hybrid hands off at the NGC fixpoint"""
        base = [ALL] * 10
        base[8] = ALL & ~(1 << 5)
        masks = NeighborhoodMasks(Scheme.NGC_DSSRC, self_only(), base)
        self.assertEqual(relaxation_step(masks, CYCLIC_TOUR), StepOutcome.REPEAT)
        self.assertEqual(relaxation_step(masks, CYCLIC_TOUR), StepOutcome.HANDOFF)
        self.assertTrue(masks.handed_off)
        self.assertEqual(nodes_with(masks, 5), [5, 6, 8, 9])

    def test_ng_dssrc_hands_off(self):
        """Test NG-DSSRC hands off on its first cyclic optimum"""
        masks = NeighborhoodMasks(Scheme.NG_DSSRC, self_only(), [ALL] * 10)
        self.assertEqual(relaxation_step(masks, CYCLIC_TOUR), StepOutcome.HANDOFF)
        self.assertEqual(nodes_with(masks, 6), [6, 8])
        self.assertEqual(relaxation_step(masks, [0, 5, 7, 5, 3]), StepOutcome.REPEAT)
        self.assertEqual(nodes_with(masks, 5), [5, 6, 7, 8, 9])

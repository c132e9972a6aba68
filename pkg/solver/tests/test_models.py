import math

from django.test import SimpleTestCase, override_settings
from django.conf import settings

from labels.models import JoinMode, SelectionStrategy
from pathwise.exceptions import ConfigError
from problems.models import CyclicityClass
from relaxations.models import Scheme
from solver.models import DirectionMode, Path, PathStatus, SolverConfig, SolveStats
from solver.serializers import PathSerializer
from solver.services import update_hwp


class SolverConfigTest(SimpleTestCase):
    """Test suite for SolverConfig"""

    def test_library_defaults(self):
        """Test defaults come from settings"""
        config = SolverConfig.from_settings()
        self.assertEqual(config.relaxation, Scheme.NGC_DSSRC)
        self.assertEqual(config.ng_size, 16)
        self.assertEqual(config.hwp, 0.5)
        self.assertEqual(config.time_limit, 3600)

    def test_profiles(self):
        """Test the cyclicity profiles"""
        cyclic = SolverConfig.from_settings(CyclicityClass.CYCLIC)
        self.assertEqual(cyclic.selection, SelectionStrategy.NODE)
        self.assertTrue(cyclic.unreachable)
        acyclic = SolverConfig.from_settings(CyclicityClass.ACYCLIC)
        self.assertEqual(acyclic.selection, SelectionStrategy.ROUND_ROBIN)

    def test_overrides_win(self):
        """Test overrides beat profile values"""
        config = SolverConfig.from_settings(CyclicityClass.CYCLIC, selection='rr', join='naive')
        self.assertEqual(config.selection, SelectionStrategy.ROUND_ROBIN)
        self.assertEqual(config.join, JoinMode.NAIVE)

    @override_settings(PATHWISE={**settings.PATHWISE, 'relaxation': 'dssr'})
    def test_settings_override(self):
        """Test defaults follow overridden settings"""
        self.assertEqual(SolverConfig.from_settings().relaxation, Scheme.DSSR)

    def test_unknown_key(self):
        """Test unknown keys are rejected by name"""
        with self.assertRaises(ConfigError) as raised:
            SolverConfig.from_settings(hwp_stepp=0.1)
        self.assertEqual(raised.exception.key, 'hwp_stepp')

    def test_bad_values(self):
        """Test every range check names its key"""
        cases = {
            'relaxation': 'dssx',
            'selection': 'random',
            'direction': 'backward',
            'storage': 'csr',
            'ng_size': 0,
            'hwp': 1.5,
            'hwp_step': 0,
            'hwp_threshold': 1,
            'time_limit': 0,
            'density_threshold': 2,
            'dimacs_time_divisor': -1,
        }
        for key, value in cases.items():
            with self.subTest(key=key):
                with self.assertRaises(ConfigError) as raised:
                    SolverConfig(**{key: value}).validate()
                self.assertEqual(raised.exception.key, key)

    def test_normalizes_choices(self):
        """Test string choices become enum members"""
        config = SolverConfig(direction='forward').validate()
        self.assertIs(config.direction, DirectionMode.FORWARD)

    def test_keys(self):
        """Test every field is a key"""
        self.assertIn('report_timers', SolverConfig.keys())
        self.assertEqual(len(SolverConfig.keys()), len(set(SolverConfig.keys())))


class UpdateHwpTest(SimpleTestCase):
    """Test suite for the half-way point update"""

    def test_more_backward_labels(self):
        """Test the point moves forward"""
        self.assertEqual(update_hwp(50, 100, 130, 100), 55)

    def test_more_forward_labels(self):
        """Test the point moves backward"""
        self.assertEqual(update_hwp(50, 130, 100, 100), 45)

    def test_balanced(self):
        """Test small imbalances leave the point alone"""
        self.assertEqual(update_hwp(50, 110, 100, 100), 50)
        self.assertEqual(update_hwp(50, 100, 120, 100), 50)

    def test_clamped(self):
        """Test the point stays in [0, U_c]"""
        self.assertEqual(update_hwp(99, 100, 200, 100), 100)
        self.assertEqual(update_hwp(2, 200, 100, 100), 0)

    def test_custom_step_and_threshold(self):
        """Test configured step and threshold"""
        self.assertEqual(update_hwp(50, 100, 115, 100, step=0.1, threshold=0.1), 60)

    def test_degenerate_counts(self):
        """Test empty passes and unbounded resources"""
        self.assertEqual(update_hwp(50, 0, 10, 100), 50)
        self.assertEqual(update_hwp(50, 10, 0, 100), 50)
        self.assertEqual(update_hwp(50, 10, 100, math.inf), 50)


class PathTest(SimpleTestCase):
    """Test suite for Path"""

    def test_better_than(self):
        """Test cost order with lexicographic ties"""
        a = Path([0, 1, 3], 5.0)
        b = Path([0, 2, 3], 5.0)
        c = Path([0, 3], 7.0)
        self.assertTrue(a.better_than(b))
        self.assertFalse(b.better_than(a))
        self.assertTrue(a.better_than(c))
        self.assertTrue(c.better_than(None))
        self.assertTrue(c.better_than(Path()))

    def test_with_status(self):
        """Test status changes copy the path"""
        path = Path([0, 3], 7.0, (1.0,), True, PathStatus.FEASIBLE)
        optimal = path.with_status(PathStatus.OPTIMAL)
        self.assertEqual(optimal.status, PathStatus.OPTIMAL)
        self.assertEqual(path.status, PathStatus.FEASIBLE)
        self.assertEqual(optimal.tour, path.tour)

    def test_empty(self):
        """Test infeasible results"""
        path = Path()
        self.assertFalse(path.found)
        self.assertEqual(str(path), 'Path(Infeasible)')

    def test_serializer(self):
        """Test the json shape of a path"""
        data = PathSerializer(Path([0, 1, 2, 3], 3.0, (2.0,), True, PathStatus.OPTIMAL)).data
        self.assertEqual(data['status'], 'optimal')
        self.assertEqual(data['tour'], [0, 1, 2, 3])
        self.assertEqual(data['consumptions'], [2.0])


class SolveStatsTest(SimpleTestCase):
    """Test suite for SolveStats"""

    def test_add_time(self):
        """Test phase times accumulate"""
        stats = SolveStats()
        stats.add_time('join', 0.5)
        stats.add_time('join', 0.25)
        self.assertEqual(stats.phase_times, {'join': 0.75})

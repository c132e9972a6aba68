from django.test import SimpleTestCase, tag

from instgen.models import PcGenSpec
from instgen.services import generate, random_problem, random_sparse_problem
from oracle.services import enumerate_paths
from problems.models import CyclicityClass
from solver.models import PathStatus, SolverConfig
from solver.services import solve

ELEMENTARY_SCHEMES = ('dssr', 'dssrc', 'ng-dssrc', 'ngc-dssrc')


class OracleSweepMixin:
    """Compares solve against exhaustive enumeration"""

    def assertMatchesOracle(self, problem, **overrides):
        expected = enumerate_paths(problem)
        config = SolverConfig.from_settings(CyclicityClass.CYCLIC, **overrides)
        path, _ = solve(problem, config)
        label = f'{problem} with {overrides}'
        if expected.optimal_cost is None:
            self.assertEqual(path.status, PathStatus.INFEASIBLE, label)
            return
        self.assertEqual(path.status, PathStatus.OPTIMAL, label)
        self.assertAlmostEqual(path.cost, expected.optimal_cost, places=6, msg=label)
        self.assertEqual(path.tour, expected.optimal_tour, label)


class QuickOracleSweepTest(OracleSweepMixin, SimpleTestCase):
    """A few random instances per scheme"""

    def test_random_cyclic(self):
        """Test complete digraphs with negative arcs"""
        for seed in range(5):
            problem = random_problem(seed, 6)
            for scheme in ELEMENTARY_SCHEMES:
                with self.subTest(seed=seed, scheme=scheme):
                    self.assertMatchesOracle(problem, relaxation=scheme, ng_size=2)

    def test_random_acyclic(self):
        """Test sparse positive instances"""
        for seed in range(5):
            with self.subTest(seed=seed):
                self.assertMatchesOracle(random_sparse_problem(seed, 8))


@tag('slow')
class OracleSweepTest(OracleSweepMixin, SimpleTestCase):
    """Hundred seed sweeps against the oracle"""

    def test_cyclic_schemes(self):
        """Test every elementary scheme on 100 cyclic instances"""
        for seed in range(100):
            problem = random_problem(seed, 8)
            for scheme in ELEMENTARY_SCHEMES:
                with self.subTest(seed=seed, scheme=scheme):
                    self.assertMatchesOracle(problem, relaxation=scheme, ng_size=3)

    def test_half_way_point(self):
        """Test the answer does not depend on the half-way point"""
        for seed in range(20):
            problem = random_problem(seed, 7)
            for hwp in (0, 0.25, 0.5, 0.75, 1):
                with self.subTest(seed=seed, hwp=hwp):
                    self.assertMatchesOracle(problem, hwp=hwp)

    def test_modes(self):
        """Test direction, selection and join settings"""
        settings = (
            {'direction': 'forward'},
            {'selection': 'rr'},
            {'join': 'naive'},
            {'parallel': False, 'unreachable': False},
        )
        for seed in range(20):
            problem = random_problem(seed, 7, negative_fraction=0.5)
            for overrides in settings:
                with self.subTest(seed=seed, **overrides):
                    self.assertMatchesOracle(problem, **overrides)

    def test_prize_collecting(self):
        """Test small generated prize collecting instances"""
        for seed in range(10):
            problem = generate(PcGenSpec(n=7, C=25, NL=5, seed=seed))
            with self.subTest(seed=seed):
                self.assertMatchesOracle(problem)

    def test_sparse(self):
        """Test acyclic instances"""
        for seed in range(100):
            with self.subTest(seed=seed):
                self.assertMatchesOracle(random_sparse_problem(seed, 10))

"""
Integration tests for the whole solver
Sweeps complete workflows: generation, parsing, solving and the command line
"""
import tempfile
from io import StringIO
from itertools import combinations
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings, tag

from cli.models import ExitCode
from instgen.models import PcGenSpec
from instgen.services import generate, random_problem, random_sparse_problem
from oracle.services import enumerate_paths
from problems.models import CyclicityClass
from problems.parsers import load_dimacs
from solver.models import PathStatus, SolverConfig
from solver.services import solve

ELEMENTARY_SCHEMES = ('dssr', 'dssrc', 'ng-dssrc', 'ngc-dssrc')
RELAXED_SCHEMES = ('ng', 'ngc')

TEN_NODES = """\
c toy road network, shortest time 0-1-2-9 is 12
p sp 10 12
a 1 2 4
a 2 3 4
a 3 10 4
a 1 4 2
a 4 5 2
a 5 6 1
a 6 10 9
a 1 7 1
a 7 8 1
a 8 9 1
a 9 10 30
a 2 3 6
"""


def cyclic(**overrides):
    return SolverConfig.from_settings(CyclicityClass.CYCLIC, **overrides)


@tag('slow')
class OracleEquivalenceIntegrationTest(SimpleTestCase):
    """Integration tests against exhaustive enumeration"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.suite = []
        for seed in range(200):
            problem = random_problem(seed, 5 + seed % 6, negative_fraction=0.3)
            cls.suite.append((problem, enumerate_paths(problem)))

    def test_elementary_schemes_match_oracle(self):
        """Test: every elementary scheme returns the oracle cost and a feasible elementary tour"""
        for problem, expected in self.suite:
            for scheme in ELEMENTARY_SCHEMES:
                with self.subTest(problem=str(problem), scheme=scheme):
                    path, _ = solve(problem, cyclic(relaxation=scheme))
                    if not expected.feasible:
                        self.assertEqual(path.status, PathStatus.INFEASIBLE)
                        continue
                    self.assertEqual(path.status, PathStatus.OPTIMAL)
                    self.assertAlmostEqual(path.cost, expected.optimal_cost, delta=1e-6)
                    self.assertEqual(len(set(path.tour)), len(path.tour))
                    self.assertAlmostEqual(problem.tour_cost(path.tour), path.cost, delta=1e-6)

    def test_schemes_agree_pairwise(self):
        """Test: elementary schemes agree and bare relaxations bound them from below"""
        for problem, expected in self.suite[:60]:
            if not expected.feasible:
                continue
            costs = {scheme: solve(problem, cyclic(relaxation=scheme))[0].cost for scheme in ELEMENTARY_SCHEMES}
            for first, second in combinations(ELEMENTARY_SCHEMES, 2):
                self.assertAlmostEqual(costs[first], costs[second], delta=1e-6)
            for scheme in RELAXED_SCHEMES:
                with self.subTest(problem=str(problem), scheme=scheme):
                    relaxed, _ = solve(problem, cyclic(relaxation=scheme))
                    self.assertLessEqual(relaxed.cost, expected.optimal_cost + 1e-6)

    def test_half_way_point_sweep(self):
        """Test: the initial half-way point never changes the optimum"""
        for problem, expected in self.suite[:50]:
            for hwp in (0, 0.25, 0.5, 0.75, 1):
                with self.subTest(problem=str(problem), hwp=hwp):
                    path, _ = solve(problem, cyclic(hwp=hwp))
                    self.assertEqual(path.cost, expected.optimal_cost)

    def test_mode_toggles(self):
        """Test: selection, join, direction and worker settings never change the optimum"""
        toggles = (
            {'selection': 'node'}, {'selection': 'rr'},
            {'join': 'naive'}, {'join': 'bounded'},
            {'direction': 'forward'}, {'direction': 'bidirectional'},
            {'parallel': True}, {'parallel': False},
        )
        for problem, expected in self.suite[:50]:
            for overrides in toggles:
                with self.subTest(problem=str(problem), **overrides):
                    path, _ = solve(problem, cyclic(**overrides))
                    self.assertEqual(path.cost, expected.optimal_cost)


@tag('slow')
class PrizeCollectingIntegrationTest(SimpleTestCase):
    """Integration tests on generated multi-resource instances"""

    def test_dssr_solves_fifty_node_classes(self):
        """Test: the n=50 classes solve to optimality under DSSR"""
        for C in (25, 40):
            for NL in (8, 18):
                for seed in (0, 1):
                    problem = generate(PcGenSpec(n=50, C=C, NL=NL, seed=seed))
                    with self.subTest(problem=str(problem)):
                        path, stats = solve(problem, cyclic(relaxation='dssr', time_limit=60))
                        self.assertEqual(path.status, PathStatus.OPTIMAL)
                        self.assertEqual(path.tour[0], 0)
                        self.assertEqual(path.tour[-1], problem.n - 1)
                        self.assertLessEqual(len(path.tour), NL)
                        self.assertGreaterEqual(stats.iterations, 1)


@tag('slow')
class AcyclicIntegrationTest(SimpleTestCase):
    """Integration tests for the acyclic fast path"""

    def test_matches_forward_reference(self):
        """Test: the acyclic profile matches a plain forward run"""
        for seed in range(50):
            n = (50, 100, 200)[seed % 3]
            problem = random_sparse_problem(seed, n, density=0.05)
            reference = SolverConfig.from_settings(
                direction='forward', selection='node', compress=False, storage='dense',
            )
            with self.subTest(problem=str(problem)):
                fast, _ = solve(problem)
                slow, _ = solve(problem, reference)
                self.assertEqual(fast.status, slow.status)
                self.assertAlmostEqual(fast.cost, slow.cost, delta=1e-6)


@override_settings(PATHWISE_SET='/nonexistent/pathwise.set')
class CommandLineIntegrationTest(SimpleTestCase):
    """Integration tests for command line workflows"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.network = self.dir / 'toy.gr'
        self.network.write_text(TEN_NODES)

    def tearDown(self):
        self.tmp.cleanup()

    def solve(self, *args, **options):
        out = StringIO()
        call_command('solve', *args, stdout=out, **options)
        return out.getvalue().splitlines()

    def test_dimacs_round_trip(self):
        """Test: header counts survive duplicate collapse"""
        problem = load_dimacs(self.network, 0, 9, 100)
        self.assertEqual(problem.n, 10)
        self.assertEqual(problem.graph.arc_count, 11)

    def test_dimacs_bound_at_optimum(self):
        """Test: the shortest time path is found when the bound allows it"""
        lines = self.solve(str(self.network), format='dimacs', source=0, dest=9, bound=12)
        self.assertIn('status optimal', lines)
        self.assertIn('cost 12', lines)
        self.assertIn('tour 0 1 2 9', lines)

    def test_dimacs_bound_below_optimum(self):
        """Test: a bound under the shortest time exits with 2"""
        problem = load_dimacs(self.network, 0, 9, 11)
        self.assertFalse(enumerate_paths(problem).feasible)
        with self.assertRaises(CommandError) as raised:
            self.solve(str(self.network), format='dimacs', source=0, dest=9, bound=11)
        self.assertEqual(raised.exception.returncode, ExitCode.INFEASIBLE)

    @tag('slow')
    def test_generate_then_solve(self):
        """Test: a generated fifty node instance solves to optimality"""
        target = self.dir / 'pc-50.txt'
        call_command('gen_pc', n=50, C=25, NL=8, seed=7, out=str(target), stdout=StringIO())
        lines = self.solve(str(target), format='pc')
        self.assertIn('status optimal', lines)

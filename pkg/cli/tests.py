import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from cli.config import convert_value, load_config, read_settings_file
from cli.models import ExitCode
from pathwise.exceptions import ConfigError
from problems import samples
from problems.parsers import load_pc, write_native
from relaxations.models import Scheme
from solver.models import PathStatus, SolverConfig

DISCONNECTED = """\
NODES 3
SOURCE 0
DEST 2
ARCS
0 1 1
RESOURCE CAPACITY 0 5
"""


class CliTestMixin:
    """Temporary directory with instance files"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, text):
        path = self.dir / name
        path.write_text(text)
        return str(path)

    def command(self, name, *args, **options):
        out = StringIO()
        call_command(name, *args, stdout=out, **options)
        return out.getvalue()


@override_settings(PATHWISE_SET='/nonexistent/pathwise.set')
class SolveCommandTest(CliTestMixin, SimpleTestCase):
    """Test suite for the solve command"""

    def setUp(self):
        super().setUp()
        self.t4 = self.write('t4.txt', write_native(samples.t4()))

    def test_solve_text(self):
        """Test the text result of the four node instance"""
        output = self.command('solve', self.t4)
        lines = output.splitlines()
        self.assertIn('status optimal', lines)
        self.assertIn('cost 3', lines)
        self.assertIn('tour 0 1 2 3', lines)
        self.assertIn('consumptions 2', lines)
        self.assertIn('elementary true', lines)
        self.assertIn('seed 0', lines)

    def test_solve_json(self):
        """Test the Json result leaves timings out by default"""
        payload = json.loads(self.command('solve', self.t4, json=True))
        self.assertEqual(payload['path']['cost'], 3.0)
        self.assertEqual(payload['path']['tour'], [0, 1, 2, 3])
        self.assertNotIn('phase_times', payload['stats'])
        self.assertEqual(payload['seed'], 0)
        self.assertNotIn('timers', payload['telemetry'])
        self.assertGreater(payload['telemetry']['counters']['labels_fw'], 0)

    def test_output_is_deterministic(self):
        """Test two runs print the same text"""
        self.assertEqual(self.command('solve', self.t4), self.command('solve', self.t4))

    def test_seed_reported(self):
        """Test the run seed is echoed in text and Json results"""
        self.assertIn('seed 5', self.command('solve', self.t4, seed=5).splitlines())
        payload = json.loads(self.command('solve', self.t4, seed=5, json=True))
        self.assertEqual(payload['seed'], 5)

    def test_out_file(self):
        """Test --out writes the result to a file"""
        target = self.dir / 'result.txt'
        output = self.command('solve', self.t4, out=str(target))
        self.assertIn('Wrote', output)
        self.assertIn('cost 3', target.read_text())

    def test_solver_flags(self):
        """Test scheme and strategy flags reach the solver"""
        instance = self.write('t4_cycle.txt', write_native(samples.t4_cycle()))
        output = self.command(
            'solve', instance, relaxation='dssr', selection='rr', join='naive', ng_size=2,
            parallel=False,
        )
        self.assertIn('cost -7', output.splitlines())

    def test_infeasible_exit_code(self):
        """Test an instance without a route exits with 2"""
        instance = self.write('disconnected.txt', DISCONNECTED)
        out = StringIO()
        with self.assertRaises(CommandError) as raised:
            call_command('solve', instance, stdout=out)
        self.assertEqual(raised.exception.returncode, ExitCode.INFEASIBLE)
        self.assertIn('status infeasible', out.getvalue())
        self.assertIn('tour -', out.getvalue())

    def test_time_limit_exit_code(self):
        """Test a spent budget exits with 3"""
        instance = self.write('t4_cycle.txt', write_native(samples.t4_cycle()))
        out = StringIO()
        with self.assertRaises(CommandError) as raised:
            call_command('solve', instance, time_limit=1e-9, stdout=out)
        self.assertEqual(raised.exception.returncode, ExitCode.TIME_LIMIT)
        self.assertIn(f'status {PathStatus.TIME_LIMIT.value}', out.getvalue())

    def test_missing_instance(self):
        """Test a missing instance file is an error"""
        with self.assertRaises(CommandError) as raised:
            self.command('solve', str(self.dir / 'missing.txt'))
        self.assertEqual(raised.exception.returncode, ExitCode.ERROR)

    def test_malformed_instance(self):
        """Test parse errors name the offending line"""
        instance = self.write('bad.txt', 'NODES 3\nSOURCE x\n')
        with self.assertRaises(CommandError) as raised:
            self.command('solve', instance)
        self.assertIn(':2:', str(raised.exception))

    def test_dimacs_needs_endpoints(self):
        """Test DIMACS instances require source, destination and bound"""
        instance = self.write('net.gr', 'p sp 2 1\na 1 2 5\n')
        with self.assertRaises(CommandError) as raised:
            self.command('solve', instance, format='dimacs')
        self.assertIn('source', str(raised.exception))

    def test_bad_config_value(self):
        """Test a parameters file error reports its line"""
        config = self.write('run.set', '# run\nng_size = 0\n')
        with self.assertRaises(CommandError) as raised:
            self.command('solve', self.t4, config_path=config)
        self.assertIn('line 2', str(raised.exception))


@override_settings(PATHWISE_SET='/nonexistent/pathwise.set')
class OtherCommandsTest(CliTestMixin, SimpleTestCase):
    """Test suite for the oracle, validate and gen_pc commands"""

    def test_oracle(self):
        """Test the oracle agrees with the solver on the four node instance"""
        instance = self.write('t4.txt', write_native(samples.t4()))
        lines = self.command('oracle', instance).splitlines()
        self.assertIn('cost 3', lines)
        self.assertIn('tour 0 1 2 3', lines)

    def test_oracle_node_cap(self):
        """Test the oracle refuses instances above its node cap"""
        instance = self.write('t4.txt', write_native(samples.t4()))
        with self.assertRaises(CommandError):
            self.command('oracle', instance, node_cap=3)

    def test_oracle_infeasible(self):
        """Test the oracle exits with 2 without a route"""
        instance = self.write('disconnected.txt', DISCONNECTED)
        with self.assertRaises(CommandError) as raised:
            self.command('oracle', instance)
        self.assertEqual(raised.exception.returncode, ExitCode.INFEASIBLE)

    def test_validate(self):
        """Test the validate summary"""
        instance = self.write('t3neg.txt', write_native(samples.t3neg()))
        lines = self.command('validate', instance).splitlines()
        self.assertIn('nodes 3', lines)
        self.assertIn('arcs 3', lines)
        self.assertIn('resources nodelimit', lines)
        self.assertIn('cyclicity cyclic', lines)
        self.assertIn('negative_cycle true', lines)

    def test_validate_storage_from_config(self):
        """Test parameters file thresholds choose the storage mode"""
        instance = self.write('t4.txt', write_native(samples.t4()))
        lines = self.command('validate', instance).splitlines()
        self.assertIn('storage dense', lines)
        self.assertIn('density 0.3750', lines)
        config = self.write('run.set', 'small_n_threshold = 0\ndensity_threshold = 0.9\n')
        lines = self.command('validate', instance, config_path=config).splitlines()
        self.assertIn('storage sparse', lines)

    def test_gen_pc_deterministic(self):
        """Test equal seeds generate equal instances"""
        first = self.command('gen_pc', n=10, C=20, NL=5, seed=3)
        second = self.command('gen_pc', n=10, C=20, NL=5, seed=3)
        self.assertEqual(first, second)
        self.assertNotEqual(first, self.command('gen_pc', n=10, C=20, NL=5, seed=4))

    def test_gen_pc_loads(self):
        """Test generated files load as prize collecting instances"""
        target = self.dir / 'pc.txt'
        self.command('gen_pc', n=10, C=20, NL=5, seed=3, out=str(target))
        problem = load_pc(target)
        self.assertEqual(problem.n, 11)
        self.assertEqual(problem.name, 'pc-n10-C20-NL5-s3')

    def test_gen_pc_invalid(self):
        """Test generator arguments are validated"""
        with self.assertRaises(CommandError):
            self.command('gen_pc', n=1)


@override_settings(PATHWISE_SET='/nonexistent/pathwise.set')
class ConfigFileTest(CliTestMixin, SimpleTestCase):
    """Test suite for parameters files"""

    def test_read(self):
        """Test values are typed by their field"""
        path = self.write('run.set', 'relaxation = dssr  # exact\nng_size=4\nparallel = off\n')
        values = read_settings_file(path)
        self.assertEqual(values['relaxation'], ('dssr', 1))
        self.assertEqual(values['ng_size'], (4, 2))
        self.assertEqual(values['parallel'], (False, 3))

    def test_file_beats_defaults(self):
        """Test file values override the library defaults"""
        path = self.write('run.set', 'relaxation = dssr\n')
        self.assertEqual(load_config(path).relaxation, Scheme.DSSR)

    def test_flag_beats_file(self):
        """Test command line values override the file"""
        path = self.write('run.set', 'relaxation = dssr\nhwp = 0.4\n')
        config = load_config(path, {'relaxation': 'ng', 'hwp': None})
        self.assertEqual(config.relaxation, Scheme.NG)
        self.assertEqual(config.hwp, 0.4)

    def test_unknown_key_line(self):
        """Test an unknown key reports its line"""
        path = self.write('run.set', 'relaxation = dssr\n\n# comment\nspeed = 11\n')
        with self.assertRaises(ConfigError) as raised:
            load_config(path)
        self.assertEqual(raised.exception.line, 4)
        self.assertEqual(raised.exception.key, 'speed')

    def test_duplicate_key(self):
        """Test a key set twice is rejected"""
        path = self.write('run.set', 'hwp = 0.5\nhwp = 0.6\n')
        with self.assertRaises(ConfigError) as raised:
            read_settings_file(path)
        self.assertEqual(raised.exception.line, 2)

    def test_missing_equals(self):
        """Test lines need a key and a value"""
        path = self.write('run.set', 'hwp 0.5\n')
        with self.assertRaises(ConfigError):
            read_settings_file(path)

    def test_missing_file(self):
        """Test a missing parameters file yields the defaults"""
        with self.assertLogs('cli.config', 'WARNING'):
            config = load_config(str(self.dir / 'absent.set'))
        self.assertEqual(config, SolverConfig.from_settings())

    def test_default_path(self):
        """Test the configured parameters file is read without a flag"""
        path = self.write('pathwise.set', 'join = naive\n')
        with self.settings(PATHWISE_SET=path):
            self.assertEqual(load_config().join, 'naive')

    def test_convert_value(self):
        """Test value conversion"""
        self.assertTrue(convert_value('parallel', 'yes'))
        self.assertIsNone(convert_value('log_file', 'none'))
        self.assertEqual(convert_value('time_limit', '2.5'), 2.5)
        with self.assertRaises(ConfigError):
            convert_value('ng_size', 'many')
        with self.assertRaises(ConfigError):
            convert_value('parallel', 'maybe')

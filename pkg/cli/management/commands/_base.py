import argparse

from django.core.management.base import BaseCommand, CommandError

from cli.models import CliInvocation, ExitCode, InstanceFormat
from cli.services import run
from labels.models import JoinMode, SelectionStrategy
from pathwise.exceptions import PathwiseError
from relaxations.models import Scheme

# flag destination -> SolverConfig key
CONFIG_FLAGS = {
    'relaxation': 'relaxation',
    'ng_size': 'ng_size',
    'selection': 'selection',
    'join': 'join',
    'hwp': 'hwp',
    'time_limit': 'time_limit',
    'parallel': 'parallel',
    'seed': 'seed',
}


class PathwiseCommand(BaseCommand):
    """
    Base for commands that read an instance.

    Library errors become CommandError with exit code 1; infeasible and
    time limited results exit with 2 and 3 once their output is written.
    """

    subcommand = None
    solver_flags = False

    def add_arguments(self, parser):
        parser.add_argument('instance', help='Instance file')
        parser.add_argument(
            '--format', default=InstanceFormat.NATIVE, choices=InstanceFormat.values,
            help='Instance file format',
        )
        parser.add_argument('--config', dest='config_path', help='Parameters file')
        parser.add_argument('--out', help='Write the result here instead of stdout')
        parser.add_argument('--source', type=int, help='DIMACS origin node, 0-based')
        parser.add_argument('--dest', type=int, help='DIMACS destination node, 0-based')
        parser.add_argument('--bound', type=float, help='DIMACS time bound')
        parser.add_argument('--time-file', help='DIMACS travel time graph')
        parser.add_argument('--coords', help='DIMACS coordinate file')
        if self.solver_flags:
            self.add_solver_arguments(parser)

    def add_solver_arguments(self, parser):
        parser.add_argument('--relaxation', choices=Scheme.values)
        parser.add_argument('--ng-size', type=int)
        parser.add_argument('--selection', choices=SelectionStrategy.values)
        parser.add_argument('--join', choices=JoinMode.values)
        parser.add_argument('--hwp', type=float, help='Initial half-way point, a fraction')
        parser.add_argument('--time-limit', type=float, help='Seconds')
        parser.add_argument('--parallel', action=argparse.BooleanOptionalAction, default=None)
        parser.add_argument('--seed', type=int)
        parser.add_argument('--json', action='store_true', help='Json output')

    def invocation(self, options):
        overrides = {key: options.get(flag) for flag, key in CONFIG_FLAGS.items()}
        return CliInvocation(
            subcommand=self.subcommand,
            instance=options['instance'],
            format=options['format'],
            config_path=options['config_path'],
            overrides={key: value for key, value in overrides.items() if value is not None},
            out=options['out'],
            json=options.get('json', False),
            source=options['source'],
            dest=options['dest'],
            bound=options['bound'],
            time_file=options['time_file'],
            coords=options['coords'],
        )

    def execute_invocation(self, invocation, **extra):
        try:
            code = run(invocation, self.stdout, **extra)
        except PathwiseError as e:
            raise CommandError(str(e))
        except OSError as e:
            raise CommandError(f'{e.filename}: {e.strerror}')
        if code != ExitCode.OK:
            raise CommandError(ExitCode(code).label, returncode=int(code))
        if invocation.out:
            self.stdout.write(self.style.SUCCESS(f'✓ Wrote {invocation.out}'))
        return code

    def handle(self, *args, **options):
        self.execute_invocation(self.invocation(options))

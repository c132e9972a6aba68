from cli.management.commands._base import PathwiseCommand
from cli.models import CliInvocation, Subcommand
from instgen.models import PcGenSpec


class Command(PathwiseCommand):
    help = 'Generate a prize collecting instance in the native format'

    subcommand = Subcommand.GEN_PC

    def add_arguments(self, parser):
        parser.add_argument('--n', type=int, default=50, help='Customers plus the depot')
        parser.add_argument('--C', type=float, default=25, help='First capacity bound')
        parser.add_argument('--NL', type=int, default=8, help='Node limit')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--wide-fraction', type=float, default=0.8,
                            help='Share of customers with wide time windows')
        parser.add_argument('--coords', help='Base coordinates, one "x y [demand]" row per node')
        parser.add_argument('--out', help='Write the instance here instead of stdout')

    def handle(self, *args, **options):
        spec = PcGenSpec(
            n=options['n'], C=options['C'], NL=options['NL'], seed=options['seed'],
            wide_tw_fraction=options['wide_fraction'],
        )
        invocation = CliInvocation(
            subcommand=self.subcommand, coords=options['coords'], out=options['out'],
        )
        self.execute_invocation(invocation, spec=spec)

from cli.management.commands._base import PathwiseCommand
from cli.models import Subcommand
from oracle.services import DEFAULT_NODE_CAP


class Command(PathwiseCommand):
    help = 'Solve a small instance by enumerating every elementary path'

    subcommand = Subcommand.ORACLE

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--node-cap', type=int, default=DEFAULT_NODE_CAP,
                            help='Refuse instances with more nodes')

    def handle(self, *args, **options):
        self.execute_invocation(self.invocation(options), node_cap=options['node_cap'])

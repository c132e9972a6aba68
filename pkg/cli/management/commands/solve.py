from cli.management.commands._base import PathwiseCommand
from cli.models import Subcommand


class Command(PathwiseCommand):
    help = 'Solve a resource constrained shortest path instance'

    subcommand = Subcommand.SOLVE
    solver_flags = True

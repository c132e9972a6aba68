from cli.management.commands._base import PathwiseCommand
from cli.models import Subcommand


class Command(PathwiseCommand):
    help = 'Check an instance and print a summary of it'

    subcommand = Subcommand.VALIDATE

from dataclasses import dataclass, field

from django.db import models

from solver.models import PathStatus


class Subcommand(models.TextChoices):
    SOLVE = 'solve', 'Solve'
    ORACLE = 'oracle', 'Oracle'
    GEN_PC = 'gen_pc', 'Generate prize collecting instance'
    VALIDATE = 'validate', 'Validate'


class InstanceFormat(models.TextChoices):
    NATIVE = 'native', 'Native'
    DIMACS = 'dimacs', 'DIMACS'
    PC = 'pc', 'Prize collecting'


class ExitCode(models.IntegerChoices):
    OK = 0, 'Optimal or feasible'
    ERROR = 1, 'Error'
    INFEASIBLE = 2, 'Infeasible'
    TIME_LIMIT = 3, 'Time limit'

    @classmethod
    def for_status(cls, status):
        return {
            PathStatus.INFEASIBLE: cls.INFEASIBLE,
            PathStatus.TIME_LIMIT: cls.TIME_LIMIT,
        }.get(status, cls.OK)


@dataclass
class CliInvocation:
    """
    One command line run.

    overrides holds configuration keys given as flags; they win over the
    parameters file, which wins over the library defaults.
    """

    subcommand: str
    instance: str = None
    format: str = InstanceFormat.NATIVE
    config_path: str = None
    overrides: dict = field(default_factory=dict)
    out: str = None
    json: bool = False
    source: int = None
    dest: int = None
    bound: float = None
    time_file: str = None
    coords: str = None

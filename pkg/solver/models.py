from dataclasses import dataclass, field, fields

from django.conf import settings
from django.db import models

from labels.models import JoinMode, SelectionStrategy
from pathwise.exceptions import ConfigError
from relaxations.models import Scheme
from telemetry.models import ReportFormat


class DirectionMode(models.TextChoices):
    BIDIRECTIONAL = 'bidirectional', 'Bidirectional'
    FORWARD = 'forward', 'Forward only'


class PathStatus(models.TextChoices):
    OPTIMAL = 'optimal', 'Optimal'
    FEASIBLE = 'feasible', 'Feasible'
    INFEASIBLE = 'infeasible', 'Infeasible'
    TIME_LIMIT = 'timelimit', 'Time limit'


@dataclass
class SolverConfig:
    """
    Every tunable of a run.

    Defaults come from settings.PATHWISE and its cyclic/acyclic profile,
    see from_settings.
    """

    relaxation: str = Scheme.NGC_DSSRC
    ng_size: int = 16
    selection: str = SelectionStrategy.NODE
    join: str = JoinMode.BOUNDED
    hwp: float = 0.5
    hwp_step: float = 0.05
    hwp_threshold: float = 0.20
    time_limit: float = 3600.0
    direction: str = DirectionMode.BIDIRECTIONAL
    parallel: bool = False
    elementary: bool = True
    unreachable: bool = False
    compress: bool = False
    storage: str = 'auto'
    density_threshold: float = 0.25
    small_n_threshold: int = 1024
    dimacs_time_divisor: float = 1.0
    telemetry: bool = True
    log_file: str = None
    report_format: str = ReportFormat.TEXT
    report_timers: bool = False
    seed: int = 0

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def from_settings(cls, cyclicity=None, **overrides):
        """
        Library defaults for a cyclicity class, with overrides applied last.

        Args:
            cyclicity (CyclicityClass | str | None): selects the profile
        """
        defaults = settings.PATHWISE
        values = {key: defaults[key] for key in cls.keys() if key in defaults}
        if cyclicity is not None:
            values.update(defaults.get(str(cyclicity), {}))
        values.update(overrides)
        unknown = set(values) - set(cls.keys())
        if unknown:
            raise ConfigError('unknown configuration key', key=sorted(unknown)[0])
        config = cls(**values)
        config.validate()
        return config

    def validate(self):
        """Normalize choice fields and check ranges, raising ConfigError."""
        choices = (
            ('relaxation', Scheme),
            ('selection', SelectionStrategy),
            ('join', JoinMode),
            ('direction', DirectionMode),
            ('report_format', ReportFormat),
        )
        for key, enum in choices:
            try:
                setattr(self, key, enum(getattr(self, key)))
            except ValueError:
                allowed = ', '.join(enum.values)
                raise ConfigError(f'{getattr(self, key)!r} is not one of {allowed}', key=key)
        if self.storage not in ('auto', 'dense', 'sparse'):
            raise ConfigError(f'{self.storage!r} is not one of auto, dense, sparse', key='storage')

        if self.ng_size < 1:
            raise ConfigError('must be at least 1', key='ng_size')
        if not 0 <= self.hwp <= 1:
            raise ConfigError('must be a fraction in [0, 1]', key='hwp')
        if not 0 < self.hwp_step < 1:
            raise ConfigError('must be in (0, 1)', key='hwp_step')
        if not 0 < self.hwp_threshold < 1:
            raise ConfigError('must be in (0, 1)', key='hwp_threshold')
        if not self.time_limit > 0:
            raise ConfigError('must be positive', key='time_limit')
        if not 0 <= self.density_threshold <= 1:
            raise ConfigError('must be in [0, 1]', key='density_threshold')
        if self.small_n_threshold < 0:
            raise ConfigError('must be non-negative', key='small_n_threshold')
        if not self.dimacs_time_divisor > 0:
            raise ConfigError('must be positive', key='dimacs_time_divisor')
        return self


@dataclass
class SolveStats:
    """Per-run counters kept by the solver regardless of telemetry."""

    labels_fw: int = 0
    labels_bw: int = 0
    dominated_fw: int = 0
    dominated_bw: int = 0
    join_attempts: int = 0
    join_successes: int = 0
    iterations: int = 0
    relaxed_costs: list = field(default_factory=list)
    incumbents: list = field(default_factory=list)
    hwp_history: list = field(default_factory=list)
    phase_times: dict = field(default_factory=dict)

    def add_time(self, phase, seconds):
        self.phase_times[phase] = self.phase_times.get(phase, 0.0) + seconds


@dataclass
class Path:
    """
    A solution: node tour, cost, per-resource consumptions and status.

    Infeasible and empty time-limit results have an empty tour and no cost.
    """

    tour: list = field(default_factory=list)
    cost: float = None
    consumptions: tuple = ()
    elementary: bool = False
    status: str = PathStatus.INFEASIBLE

    def __str__(self):
        if not self.tour:
            return f'Path({self.status.label})'
        return f'Path({self.status.label}, cost={self.cost}, tour={self.tour})'

    @property
    def found(self):
        return bool(self.tour)

    def with_status(self, status):
        return Path(list(self.tour), self.cost, tuple(self.consumptions), self.elementary, status)

    def better_than(self, other, tolerance=1e-9):
        """Lower cost, ties broken by the lexicographically smaller tour."""
        if other is None or other.cost is None:
            return True
        if self.cost < other.cost - tolerance:
            return True
        return abs(self.cost - other.cost) <= tolerance and self.tour < other.tour

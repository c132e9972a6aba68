from dataclasses import dataclass

from pathwise.exceptions import ConfigError

SERVICE_TIMES = (10, 20, 30, 40)


@dataclass
class PcGenSpec:
    """
    Parameters of one generated prize collecting instance.

    base_coordinates is a list of (x, y) or (x, y, demand) rows; when it
    is None coordinates are drawn uniformly in [0, 1000]^2.
    """

    n: int = 50
    C: float = 25
    NL: int = 8
    seed: int = 0
    base_coordinates: list = None
    wide_tw_fraction: float = 0.8

    @property
    def name(self):
        return f'pc-n{self.n}-C{self.C:g}-NL{self.NL}-s{self.seed}'

    def validate(self):
        if self.n < 2:
            raise ConfigError('needs at least 2 nodes', key='n')
        if self.C <= 0:
            raise ConfigError('must be positive', key='C')
        if self.NL < 2:
            raise ConfigError('must allow at least the two depot copies', key='NL')
        if not 0 <= self.wide_tw_fraction <= 1:
            raise ConfigError('must be a fraction in [0, 1]', key='wide_tw_fraction')
        if self.base_coordinates is not None and len(self.base_coordinates) < self.n:
            raise ConfigError(
                f'{len(self.base_coordinates)} base nodes, {self.n} requested', key='n'
            )
        return self

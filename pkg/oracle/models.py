from dataclasses import dataclass


@dataclass
class OracleResult:
    """Best elementary path found by exhaustive enumeration, if any."""

    optimal_cost: float = None
    optimal_tour: list = None
    paths_enumerated: int = 0

    @property
    def feasible(self):
        return self.optimal_tour is not None

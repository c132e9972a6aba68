import copy
from dataclasses import replace

from django.db import models

from graphs.services import rebuild_graph
from pathwise.exceptions import InconsistentData


class CyclicityClass(models.TextChoices):
    ACYCLIC = 'acyclic', 'Acyclic'
    CYCLIC = 'cyclic', 'Cyclic'


class Problem:
    """
    A solvable instance: graph, arc costs and an ordered resource list.

    Exactly one resource is critical; it is selected by index. Loaders
    append human readable notes about dropped or suspicious data to
    ``warnings``.
    """

    def __init__(self, graph, cost, resources, name='', critical=0, warnings=None):
        if not resources:
            raise InconsistentData('a problem needs at least one resource')
        if not 0 <= critical < len(resources):
            raise InconsistentData(f'critical resource index {critical} out of range')
        self.graph = graph
        self.cost = cost
        self.resources = list(resources)
        self.name = name
        self.critical = critical
        self.warnings = list(warnings or [])
        for index, resource in enumerate(self.resources):
            resource.is_critical = index == critical

        # (neighbour, cost) pairs in ascending neighbour order
        self.successors = tuple(
            tuple((j, cost.get(i, j)) for j in graph.out_neighbors(i)) for i in range(graph.n)
        )
        self.predecessors = tuple(
            tuple((j, cost.get(j, i)) for j in graph.in_neighbors(i)) for i in range(graph.n)
        )

    def __repr__(self):
        return f'Problem({self.name or "unnamed"}, n={self.n}, resources={len(self.resources)})'

    def __str__(self):
        return self.name or 'unnamed problem'

    @property
    def n(self):
        return self.graph.n

    @property
    def source(self):
        return self.graph.source

    @property
    def destination(self):
        return self.graph.destination

    @property
    def critical_resource(self):
        return self.resources[self.critical]

    def arc_cost(self, i, j):
        return self.cost.get(i, j)

    def tour_cost(self, tour):
        return sum(self.cost.get(i, j) for i, j in zip(tour, tour[1:]))

    def with_storage(self, storage_mode):
        """Same instance with graph and arc data in another storage mode."""
        if storage_mode == self.graph.storage_mode:
            return self
        resources = []
        for resource in self.resources:
            clone = copy.copy(resource)
            arcs = resource.data.arc_consumption
            if arcs is not None:
                clone.data = replace(resource.data, arc_consumption=arcs.converted(storage_mode))
            resources.append(clone)
        return Problem(
            rebuild_graph(self.graph, storage_mode),
            self.cost.converted(storage_mode),
            resources,
            name=self.name,
            critical=self.critical,
            warnings=self.warnings,
        )

    def signature(self):
        """Normalized field tuple used for equality."""
        n = self.n
        resources = []
        for resource in self.resources:
            data = resource.data
            arcs = ()
            if data.arc_consumption is not None:
                arcs = tuple((arc, v) for arc, v in data.arc_consumption.items() if v != 0)
            resources.append((
                resource.kind.value,
                data.lower_bound,
                data.upper_bound,
                tuple(data.node(i) for i in range(n)),
                arcs,
                tuple(tuple(w) for w in data.windows) if data.windows is not None else None,
                tuple(data.service_time(i) for i in range(n)),
            ))
        return (
            self.name, n, self.source, self.destination, self.graph.coordinates,
            tuple(self.graph.arcs()), tuple(self.cost.items()), self.critical, tuple(resources),
        )

    def __eq__(self, other):
        if not isinstance(other, Problem):
            return NotImplemented
        return self.signature() == other.signature()

    __hash__ = None

from django.db import models


class StorageMode(models.TextChoices):
    """Adjacency storage used by a Graph and the per-arc data attached to it."""

    DENSE_BITS = 'dense', 'Dense bit rows'
    SPARSE_MAP = 'sparse', 'Sparse per-node maps'


class Graph:
    """
    Directed network topology, immutable after construction.

    Dense graphs keep one integer bit row per node, so that bit j of
    ``out_rows[i]`` tells whether arc (i, j) exists. Sparse graphs keep one
    dict per node instead. Both modes answer every query identically and
    cache sorted neighbour tuples for iteration.
    """

    __slots__ = (
        'n', 'source', 'destination', 'storage_mode', 'coordinates',
        'arc_count', '_out', '_in', '_out_sorted', '_in_sorted',
    )

    def __init__(self, n, source, destination, out_rows, in_rows, storage_mode,
                 coordinates=None):
        self.n = n
        self.source = source
        self.destination = destination
        self.storage_mode = StorageMode(storage_mode)
        self.coordinates = (
            tuple((float(x), float(y)) for x, y in coordinates) if coordinates is not None else None
        )
        self._out = out_rows
        self._in = in_rows
        self._out_sorted = tuple(tuple(self._decode(row)) for row in out_rows)
        self._in_sorted = tuple(tuple(self._decode(row)) for row in in_rows)
        self.arc_count = sum(len(row) for row in self._out_sorted)

    def __repr__(self):
        return (
            f'Graph(n={self.n}, arcs={self.arc_count}, source={self.source}, '
            f'destination={self.destination}, mode={self.storage_mode.value})'
        )

    def _decode(self, row):
        if self.storage_mode == StorageMode.DENSE_BITS:
            nodes = []
            while row:
                low = row & -row
                nodes.append(low.bit_length() - 1)
                row ^= low
            return nodes
        return sorted(row)

    @property
    def density(self):
        return self.arc_count / float(self.n * self.n)

    def has_arc(self, i, j):
        """True iff (i, j) is an arc."""
        if self.storage_mode == StorageMode.DENSE_BITS:
            return bool((self._out[i] >> j) & 1)
        return j in self._out[i]

    def out_neighbors(self, i):
        """Successors of i in ascending order."""
        return self._out_sorted[i]

    def in_neighbors(self, i):
        """Predecessors of i in ascending order."""
        return self._in_sorted[i]

    def arcs(self):
        """Iterate arcs in (tail, head) lexicographic order."""
        for i, heads in enumerate(self._out_sorted):
            for j in heads:
                yield i, j


class ArcMap:
    """
    Real values attached to arcs, stored like the owning graph.

    Dense maps are n x n lists with None marking missing arcs; sparse maps
    are one dict per tail node.
    """

    __slots__ = ('n', 'storage_mode', '_rows')

    def __init__(self, n, storage_mode):
        self.n = n
        self.storage_mode = StorageMode(storage_mode)
        if self.storage_mode == StorageMode.DENSE_BITS:
            self._rows = [[None] * n for _ in range(n)]
        else:
            self._rows = [{} for _ in range(n)]

    @classmethod
    def from_items(cls, n, storage_mode, items):
        arc_map = cls(n, storage_mode)
        for (i, j), value in items:
            arc_map.set(i, j, value)
        return arc_map

    def set(self, i, j, value):
        self._rows[i][j] = float(value)

    def get(self, i, j, default=0.0):
        value = self._rows[i][j] if self.storage_mode == StorageMode.DENSE_BITS else self._rows[i].get(j)
        return default if value is None else value

    def __contains__(self, arc):
        i, j = arc
        if self.storage_mode == StorageMode.DENSE_BITS:
            return self._rows[i][j] is not None
        return j in self._rows[i]

    def items(self):
        """Iterate ((i, j), value) in lexicographic arc order."""
        for i, row in enumerate(self._rows):
            if self.storage_mode == StorageMode.DENSE_BITS:
                for j, value in enumerate(row):
                    if value is not None:
                        yield (i, j), value
            else:
                for j in sorted(row):
                    yield (i, j), row[j]

    def __len__(self):
        return sum(1 for _ in self.items())

    def __eq__(self, other):
        if not isinstance(other, ArcMap):
            return NotImplemented
        return self.n == other.n and list(self.items()) == list(other.items())

    def converted(self, storage_mode):
        """Copy of this map in another storage mode."""
        return ArcMap.from_items(self.n, storage_mode, self.items())

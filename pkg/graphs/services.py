"""
Graph construction and conversions.
"""

import logging

import networkx as nx
from django.conf import settings

from graphs.models import Graph, StorageMode
from pathwise.exceptions import EmptyGraph, GraphError, InvalidArc

logger = logging.getLogger(__name__)


def choose_storage_mode(n, arc_count, density_threshold=None, small_n_threshold=None):
    """
    Pick dense bit rows for dense or small graphs, sparse maps otherwise.

    Args:
        n (int): node count
        arc_count (int): number of distinct arcs
        density_threshold (float): minimum m / n^2 for dense storage
        small_n_threshold (int): graphs up to this size are always dense

    Returns:
        StorageMode
    """
    if density_threshold is None:
        density_threshold = settings.PATHWISE['density_threshold']
    if small_n_threshold is None:
        small_n_threshold = settings.PATHWISE['small_n_threshold']

    if n <= small_n_threshold or arc_count / float(n * n) >= density_threshold:
        return StorageMode.DENSE_BITS
    return StorageMode.SPARSE_MAP


def build_graph(n, arcs, source, destination, mode=None, coordinates=None,
                density_threshold=None, small_n_threshold=None):
    """
    Build an immutable Graph.

    Parallel arcs are collapsed into one. Self-loops and out of range
    endpoints are rejected.

    Args:
        n (int): node count
        arcs (iterable): (i, j) pairs
        source (int): origin node
        destination (int): destination node
        mode (StorageMode | str | None): storage override, 'auto' or None picks by density
        coordinates (list | None): optional (x, y) per node

    Returns:
        Graph
    """
    if n < 2:
        raise EmptyGraph(f'a graph needs at least 2 nodes, got {n}')
    for endpoint, name in ((source, 'source'), (destination, 'destination')):
        if not 0 <= endpoint < n:
            raise InvalidArc(f'{name} {endpoint} outside [0, {n})')
    if source == destination:
        raise GraphError('source and destination must differ')
    if coordinates is not None and len(coordinates) != n:
        raise GraphError(f'expected {n} coordinate pairs, got {len(coordinates)}')

    distinct = set()
    for i, j in arcs:
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidArc(f'arc ({i}, {j}) has an endpoint outside [0, {n})')
        if i == j:
            raise InvalidArc(f'self-loop on node {i}')
        distinct.add((i, j))

    if mode in (None, 'auto'):
        mode = choose_storage_mode(n, len(distinct), density_threshold, small_n_threshold)
    mode = StorageMode(mode)

    if mode == StorageMode.DENSE_BITS:
        out_rows = [0] * n
        in_rows = [0] * n
        for i, j in distinct:
            out_rows[i] |= 1 << j
            in_rows[j] |= 1 << i
    else:
        out_rows = [{} for _ in range(n)]
        in_rows = [{} for _ in range(n)]
        for i, j in distinct:
            out_rows[i][j] = True
            in_rows[j][i] = True

    graph = Graph(n, source, destination, out_rows, in_rows, mode, coordinates)
    logger.debug('built %r', graph)
    return graph


def rebuild_graph(graph, mode):
    """Same topology in another storage mode."""
    return build_graph(
        graph.n, graph.arcs(), graph.source, graph.destination,
        mode=mode, coordinates=graph.coordinates,
    )


def to_digraph(graph, weights=None):
    """
    networkx view of the topology.

    Args:
        graph (Graph): network
        weights (callable | None): weights(i, j) stored as the 'weight' attribute
    """
    digraph = nx.DiGraph()
    digraph.add_nodes_from(range(graph.n))
    for i, j in graph.arcs():
        if weights is None:
            digraph.add_edge(i, j)
        else:
            digraph.add_edge(i, j, weight=weights(i, j))
    return digraph

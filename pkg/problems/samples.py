"""
Small hand-checked instances used by tests and examples.
"""

from graphs.models import ArcMap
from graphs.services import build_graph
from problems.models import Problem
from resources.kinds import Capacity, NodeLimit
from resources.models import ResourceData


def _assemble(name, n, source, destination, costs, resources, storage=None):
    graph = build_graph(n, costs.keys(), source, destination, mode=storage)
    cost = ArcMap.from_items(n, graph.storage_mode, sorted(costs.items()))
    return Problem(graph, cost, resources, name=name)


def t4(capacity=2, storage=None):
    """Four nodes, one capacity; optimum 0-1-2-3 with cost 3 when capacity is 2."""
    costs = {(0, 1): 1, (0, 2): 4, (0, 3): 10, (1, 2): 1, (1, 3): 5, (2, 3): 1}
    demands = Capacity(ResourceData(upper_bound=capacity, node_consumption=[0, 1, 1, 0]))
    return _assemble('t4', 4, 0, 3, costs, [demands], storage)


def t3neg(node_limit=4, storage=None):
    """Three nodes with a negative 1-2 cycle; optimum 0-1-2 with cost -10."""
    costs = {(0, 1): -5, (1, 2): -5, (2, 1): -5}
    limit = NodeLimit(ResourceData(upper_bound=node_limit, node_consumption=[0, 0, 0]))
    return _assemble('t3neg', 3, 0, 2, costs, [limit], storage)


def t4_cycle(node_limit=6, storage=None):
    """
    Four nodes with a negative 1-2 cycle between source and destination.

    Without elementarity the best path loops 0-1-2-1-2-3 for cost -17;
    the elementary optimum is 0-1-2-3 with cost -7.
    """
    costs = {(0, 1): -1, (1, 2): -5, (2, 1): -5, (2, 3): -1, (1, 3): -1}
    limit = NodeLimit(ResourceData(upper_bound=node_limit, node_consumption=[0, 0, 0, 0]))
    return _assemble('t4_cycle', 4, 0, 3, costs, [limit], storage)

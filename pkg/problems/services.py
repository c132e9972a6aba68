"""
Problem level checks and classification.
"""

import logging

import networkx as nx

from graphs.services import to_digraph
from pathwise.exceptions import InconsistentData
from problems.models import CyclicityClass
from resources.models import Direction

logger = logging.getLogger(__name__)


def validate(problem):
    """
    Check the Problem invariants, raising InconsistentData on the first violation.

    Returns:
        Problem: the same problem, for chaining
    """
    graph = problem.graph
    for i, j in graph.arcs():
        if (i, j) not in problem.cost:
            raise InconsistentData(f'no cost for arc ({i}, {j})')
    if len(problem.cost) != graph.arc_count:
        raise InconsistentData('costs given for arcs missing from the graph')

    critical = [index for index, r in enumerate(problem.resources) if r.is_critical]
    if len(critical) != 1:
        raise InconsistentData(f'expected exactly one critical resource, found {len(critical)}')

    for index, resource in enumerate(problem.resources):
        data = resource.data
        if data.node_consumption and len(data.node_consumption) != graph.n:
            raise InconsistentData(f'resource {index}: node consumption length differs from {graph.n}')
        if data.windows is not None and len(data.windows) != graph.n:
            raise InconsistentData(f'resource {index}: expected {graph.n} windows')
        if data.service is not None and len(data.service) != graph.n:
            raise InconsistentData(f'resource {index}: expected {graph.n} service times')
        if data.arc_consumption is not None:
            for (i, j), _ in data.arc_consumption.items():
                if not graph.has_arc(i, j):
                    raise InconsistentData(f'resource {index}: consumption on unknown arc ({i}, {j})')
    return problem


def classify_cyclicity(problem):
    """
    Cyclic as soon as any arc cost is negative.

    A negative cycle needs a negative arc, so this never labels an instance
    with a negative cycle as acyclic.
    """
    if any(value < 0 for _, value in problem.cost.items()):
        return CyclicityClass.CYCLIC
    return CyclicityClass.ACYCLIC


def has_negative_cycle(problem):
    """Exact negative-cost cycle test (Bellman-Ford through networkx)."""
    if classify_cyclicity(problem) == CyclicityClass.ACYCLIC:
        return False
    digraph = to_digraph(problem.graph, weights=problem.arc_cost)
    return nx.negative_edge_cycle(digraph, weight='weight')


def resource_free_cycle_nodes(problem):
    """
    Nodes on negative cycles whose arcs consume nothing of any resource.

    Such cycles can be repeated forever by a relaxed label, so the solver
    treats their nodes as elementary from the start. Cycles through the
    source or destination are ignored since labels never re-enter them.

    Returns:
        set of node ids
    """
    graph = problem.graph
    terminals = {graph.source, graph.destination}
    free = nx.DiGraph()
    for i, j in graph.arcs():
        if i in terminals or j in terminals:
            continue
        if all(r.increment_bound(i, j, Direction.FORWARD) <= 0 for r in problem.resources):
            free.add_edge(i, j, weight=problem.arc_cost(i, j))

    nodes = set()
    for component in nx.strongly_connected_components(free):
        if len(component) < 2:
            continue
        subgraph = free.subgraph(component).copy()
        if nx.negative_edge_cycle(subgraph, weight='weight'):
            nodes |= component
    if nodes:
        logger.warning('%s has resource-free negative cycles through nodes %s', problem, sorted(nodes))
    return nodes

"""
Exhaustive elementary path enumeration.

Shares only the resource init/extend/is_feasible code with the solver:
no dominance, no relaxation, no bidirectional search.
"""

import logging

from oracle.models import OracleResult
from pathwise.exceptions import InfeasibleAtSource, TooLarge
from resources.models import TOLERANCE, Direction

logger = logging.getLogger(__name__)

DEFAULT_NODE_CAP = 12


def enumerate_paths(problem, node_cap=DEFAULT_NODE_CAP):
    """
    Cheapest feasible elementary source-destination path by depth-first search.

    Partial paths are pruned only when a resource becomes infeasible.
    Equal costs keep the lexicographically smallest tour, which is the
    first one met since neighbours are visited in ascending order.

    Returns:
        OracleResult
    """
    if problem.n > node_cap:
        raise TooLarge(f'{problem} has {problem.n} nodes, the oracle handles at most {node_cap}')

    source, destination = problem.source, problem.destination
    resources = problem.resources
    result = OracleResult()
    try:
        start = tuple(r.init(source, destination)[0] for r in resources)
    except InfeasibleAtSource:
        return result

    tour = [source]
    on_tour = {source}

    def visit(node, cost, values):
        if node == destination:
            result.paths_enumerated += 1
            if not all(r.meets_lower_bound(v) for r, v in zip(resources, values)):
                return
            if result.optimal_cost is None or cost < result.optimal_cost - TOLERANCE:
                result.optimal_cost = cost
                result.optimal_tour = list(tour)
            return
        for j, arc_cost in problem.successors[node]:
            if j in on_tour:
                continue
            extended = []
            for resource, value in zip(resources, values):
                value = resource.extend(value, node, j, Direction.FORWARD)
                if not resource.is_feasible(value, j, Direction.FORWARD):
                    break
                extended.append(value)
            else:
                tour.append(j)
                on_tour.add(j)
                visit(j, cost + arc_cost, tuple(extended))
                on_tour.discard(j)
                tour.pop()

    visit(source, 0.0, start)
    logger.debug('oracle enumerated %d paths on %s', result.paths_enumerated, problem)
    return result

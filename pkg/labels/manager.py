"""
LabelManager: label creation, extension and join on one Problem.
"""

import logging
from dataclasses import dataclass

import networkx as nx
import numpy as np

from labels.models import JoinMode, Label
from resources.models import INFEASIBLE, TOLERANCE, Direction

logger = logging.getLogger(__name__)


@dataclass
class JoinedPair:
    """A feasible join: forward label, optional backward label and totals."""

    cost: float
    fw: Label
    bw: Label = None
    resources: tuple = ()

    def tour(self):
        tour = self.fw.tour()
        if self.bw is not None:
            tour += self.bw.tour()
        return tour


def _bitset(flags):
    """Pack a boolean vector into an int with bit k = flags[k]."""
    if not flags.any():
        return 0
    return int.from_bytes(np.packbits(flags, bitorder='little').tobytes(), 'little')


class LabelManager:
    """
    Label operations for one problem and one set of neighbourhood masks.

    masks is a sequence of integer bit sets, one per node. With
    ``unreachable`` on, labels also carry the nodes their critical
    resource can no longer reach, using lower bounds precomputed here.
    """

    def __init__(self, problem, masks, unreachable=False):
        self.problem = problem
        self.masks = list(masks)
        self.unreachable = unreachable
        self.critical = problem.critical
        self.critical_resource = problem.critical_resource
        self.critical_bound = self.critical_resource.critical_bound()
        self._lower_bounds = {}
        self._limits = {}
        if unreachable:
            for direction in (Direction.FORWARD, Direction.BACKWARD):
                self._lower_bounds[direction] = self._critical_lower_bounds(direction)
                self._limits[direction] = np.array([
                    self.critical_resource.limit(k, direction) for k in range(problem.n)
                ], dtype=float)

    def _critical_lower_bounds(self, direction):
        """
        n x n matrix of least critical consumption from node j to node k.

        Missing routes are infinite.
        """
        problem = self.problem
        resource = self.critical_resource
        digraph = nx.DiGraph()
        digraph.add_nodes_from(range(problem.n))
        for i, j in problem.graph.arcs():
            if direction == Direction.FORWARD:
                digraph.add_edge(i, j, weight=max(0.0, resource.increment_bound(i, j, direction)))
            else:
                # a backward label at j moves to i over arc (i, j)
                digraph.add_edge(j, i, weight=max(0.0, resource.increment_bound(j, i, direction)))
        bounds = np.full((problem.n, problem.n), np.inf)
        for origin, lengths in nx.all_pairs_dijkstra_path_length(digraph):
            for target, length in lengths.items():
                bounds[origin, target] = length
        return bounds

    def _unreachable_bits(self, node, value, direction):
        if not self.unreachable:
            return 0
        flags = value + self._lower_bounds[direction][node] > self._limits[direction] + TOLERANCE
        return _bitset(flags)

    # ==============================
    # Label creation
    # ==============================

    def initial_label(self, direction):
        """
        Root label at the source (forward) or destination (backward).

        Raises InfeasibleAtSource when a resource starts out of bounds.
        """
        problem = self.problem
        node = problem.source if direction == Direction.FORWARD else problem.destination
        side = 0 if direction == Direction.FORWARD else 1
        values = tuple(
            r.init(problem.source, problem.destination)[side] for r in problem.resources
        )
        unreachable = self._unreachable_bits(node, values[self.critical], direction) & ~(1 << node)
        return Label(node, direction, 0.0, values, 1 << node, unreachable)

    def extend_label(self, label, j, arc_cost=None):
        """
        Extend label to node j, or return INFEASIBLE.

        Forward labels follow arc (label.node, j); backward labels are
        pre-pended with arc (j, label.node). Visited and unreachable sets
        keep only the bits in the mask of j.
        """
        i = label.node
        direction = label.direction
        if (label.visited | label.unreachable) >> j & 1:
            return INFEASIBLE
        if arc_cost is None:
            tail, head = (i, j) if direction == Direction.FORWARD else (j, i)
            if not self.problem.graph.has_arc(tail, head):
                return INFEASIBLE
            arc_cost = self.problem.arc_cost(tail, head)

        values = []
        for resource, current in zip(self.problem.resources, label.resources):
            value = resource.extend(current, i, j, direction)
            if not resource.is_feasible(value, j, direction):
                return INFEASIBLE
            values.append(value)

        mask = self.masks[j]
        bit = 1 << j
        visited = (label.visited & mask) | bit
        unreachable = label.unreachable & mask
        if self.unreachable:
            unreachable |= self._unreachable_bits(j, values[self.critical], direction)
            unreachable &= ~bit
        return Label(j, direction, label.cost + arc_cost, tuple(values), visited, unreachable, label)

    def passes_threshold(self, label, extended, hwp):
        """
        Half-way rule: forward extensions must end at or below hwp, backward
        extensions must start at or below U_c - hwp.

        With a critical resource whose joins satisfy fw + bw <= U_c, every
        feasible path keeps an arc where the two regions meet.
        """
        if label.direction == Direction.FORWARD:
            return extended.resources[self.critical] <= hwp + TOLERANCE
        return label.resources[self.critical] <= self.critical_bound - hwp + TOLERANCE

    def allowed_target(self, label, j):
        """Terminal rules: never re-enter the own root nor pass the other terminal."""
        problem = self.problem
        if label.direction == Direction.FORWARD:
            return j != problem.source and label.node != problem.destination
        return j != problem.destination and j != problem.source

    def try_extend(self, label, j, arc_cost, hwp):
        """extend_label restricted by terminal rules and the half-way threshold."""
        if not self.allowed_target(label, j):
            return INFEASIBLE
        extended = self.extend_label(label, j, arc_cost)
        if extended is INFEASIBLE or not self.passes_threshold(label, extended, hwp):
            return INFEASIBLE
        return extended

    def is_extension_feasible(self, label, j, hwp):
        return self.try_extend(label, j, None, hwp) is not INFEASIBLE

    def neighbors(self, label):
        """(j, arc cost) pairs a label can be extended to, ascending j."""
        if label.direction == Direction.FORWARD:
            return self.problem.successors[label.node]
        return self.problem.predecessors[label.node]

    # ==============================
    # Join
    # ==============================

    def join_pair(self, fw, bw, bound=None, mode=JoinMode.NAIVE, arc_cost=None):
        """
        Concatenate fw at i and bw at j over arc (i, j).

        Bounded mode discards pairs more expensive than bound before any
        resource work. Returns a JoinedPair or INFEASIBLE.
        """
        problem = self.problem
        i, j = fw.node, bw.node
        if arc_cost is None:
            if not problem.graph.has_arc(i, j):
                return INFEASIBLE
            arc_cost = problem.arc_cost(i, j)
        total = fw.cost + arc_cost + bw.cost
        if mode == JoinMode.BOUNDED and bound is not None and total > bound + TOLERANCE:
            return INFEASIBLE
        if fw.visited & bw.visited:
            return INFEASIBLE

        values = []
        for resource, fw_value, bw_value in zip(problem.resources, fw.resources, bw.resources):
            value = resource.join(fw_value, bw_value, i, j)
            if value is INFEASIBLE or not resource.meets_lower_bound(value):
                return INFEASIBLE
            values.append(value)
        return JoinedPair(total, fw, bw, tuple(values))

    def complete(self, fw):
        """A forward label at the destination as a finished path, or INFEASIBLE."""
        if fw.node != self.problem.destination:
            return INFEASIBLE
        for resource, value in zip(self.problem.resources, fw.resources):
            if not resource.meets_lower_bound(value):
                return INFEASIBLE
        return JoinedPair(fw.cost, fw, None, tuple(fw.resources))

    def join(self, fw_pool, bw_pool, incumbent=None, mode=JoinMode.BOUNDED, counters=None):
        """
        Best join over every arc (i, j), plus forward labels already at the
        destination.

        Ties on cost go to the lexicographically smallest tour.

        Returns:
            tuple: (JoinedPair or None, attempts, successes)
        """
        problem = self.problem
        source, destination = problem.source, problem.destination
        bounded = mode == JoinMode.BOUNDED
        best = None
        attempts = successes = 0

        def consider(candidate):
            nonlocal best
            if best is None or candidate.cost < best.cost - TOLERANCE:
                best = candidate
            elif abs(candidate.cost - best.cost) <= TOLERANCE and candidate.tour() < best.tour():
                best = candidate

        def current_bound():
            values = [v for v in (incumbent, best.cost if best is not None else None) if v is not None]
            return min(values) if values else None

        for fw in sorted(fw_pool.labels(destination), key=lambda l: (l.cost, l.serial)):
            attempts += 1
            joined = self.complete(fw)
            if joined is not INFEASIBLE:
                successes += 1
                consider(joined)

        fw_sorted = [sorted(fw_pool.labels(i), key=lambda l: (l.cost, l.serial)) for i in range(problem.n)]
        bw_sorted = [sorted(bw_pool.labels(j), key=lambda l: (l.cost, l.serial)) for j in range(problem.n)]

        for i in range(problem.n):
            if i == destination or not fw_sorted[i]:
                continue
            for j, arc_cost in problem.successors[i]:
                if j == source or not bw_sorted[j]:
                    continue
                cheapest_bw = bw_sorted[j][0].cost
                for fw in fw_sorted[i]:
                    bound = current_bound()
                    if bounded and bound is not None and fw.cost + arc_cost + cheapest_bw > bound + TOLERANCE:
                        break
                    for bw in bw_sorted[j]:
                        bound = current_bound()
                        if bounded and bound is not None and fw.cost + arc_cost + bw.cost > bound + TOLERANCE:
                            break
                        attempts += 1
                        joined = self.join_pair(fw, bw, bound, mode, arc_cost)
                        if joined is not INFEASIBLE:
                            successes += 1
                            consider(joined)

        if counters is not None:
            counters.record('join_attempts', attempts)
            counters.record('join_successes', successes)
        return best, attempts, successes

    # ==============================
    # Debugging
    # ==============================

    def replay(self, tour, direction=Direction.FORWARD):
        """
        Labels produced by extending along tour, ignoring the half-way point.

        Forward replays start at tour[0], backward replays at tour[-1].
        Stops at the first infeasible extension.
        """
        direction = Direction(direction)
        label = self.initial_label(direction)
        steps = tour[1:] if direction == Direction.FORWARD else tour[-2::-1]
        produced = [label]
        for node in steps:
            label = self.extend_label(label, node)
            if label is INFEASIBLE:
                break
            produced.append(label)
        return produced

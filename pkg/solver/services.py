"""
Bidirectional labeling solver.

Each relaxation iteration starts from empty pools, runs a forward and a
backward pass bounded by the half-way point, joins the two pools and
hands the relaxed optimum to the relaxation controller.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor

from labels.manager import LabelManager
from labels.models import LabelPool
from pathwise.exceptions import (
    ConfigError, DecodeMismatch, InfeasibleAtSource, NonTerminating, TimeLimitReached,
)
from problems.models import CyclicityClass
from problems.services import classify_cyclicity, resource_free_cycle_nodes
from relaxations.models import Scheme, StepOutcome
from relaxations.services import init_masks, relaxation_step
from resources.models import TOLERANCE, Direction
from solver.models import DirectionMode, Path, PathStatus, SolverConfig, SolveStats
from telemetry.models import Counters

logger = logging.getLogger(__name__)

DECODE_TOLERANCE = 1e-6


def update_hwp(hwp, n_f, n_b, critical_bound, step=0.05, threshold=0.20):
    """
    Shift the half-way point toward the direction that generated fewer labels.

    Moves by step * U_c when one direction produced more than threshold
    (relative) labels than the other, and clamps to [0, U_c].
    """
    if n_f <= 0 or n_b <= 0 or not math.isfinite(critical_bound):
        return hwp
    if (n_b - n_f) / n_f > threshold:
        hwp += step * critical_bound
    elif (n_f - n_b) / n_b > threshold:
        hwp -= step * critical_bound
    return min(max(hwp, 0.0), critical_bound)


def run_direction_pass(pool, manager, hwp, deadline=None):
    """
    Extend labels of one pool until its frontier is empty.

    Raises TimeLimitReached when deadline (a time.monotonic value) passes.

    Returns:
        int: labels generated by this pass
    """
    before = pool.generated
    while True:
        if deadline is not None and time.monotonic() > deadline:
            raise TimeLimitReached(f'{pool.direction.label} pass hit the time limit')
        label = pool.get_candidate()
        if label is None:
            break
        for j, arc_cost in manager.neighbors(label):
            extended = manager.try_extend(label, j, arc_cost, hwp)
            if extended is not None:
                pool.insert(extended)
    return pool.generated - before


def extract_path(fw, bw, problem, status=PathStatus.FEASIBLE):
    """
    Decode a joined pair into a Path and check it against the labels.

    Consumptions come from a fresh forward sweep over the tour.
    """
    tour = fw.tour()
    label_cost = fw.cost
    if bw is not None:
        tour += bw.tour()
        if not problem.graph.has_arc(fw.node, bw.node):
            raise DecodeMismatch(f'labels at {fw.node} and {bw.node} are not adjacent')
        label_cost += problem.arc_cost(fw.node, bw.node) + bw.cost

    if tour[0] != problem.source or tour[-1] != problem.destination:
        raise DecodeMismatch(f'tour {tour} does not run from {problem.source} to {problem.destination}')
    for i, j in zip(tour, tour[1:]):
        if not problem.graph.has_arc(i, j):
            raise DecodeMismatch(f'tour {tour} uses missing arc ({i}, {j})')

    cost = problem.tour_cost(tour)
    if abs(cost - label_cost) > DECODE_TOLERANCE:
        raise DecodeMismatch(f'tour {tour} costs {cost}, labels say {label_cost}')

    consumptions = []
    for resource in problem.resources:
        value = resource.init(problem.source, problem.destination)[0]
        for i, j in zip(tour, tour[1:]):
            value = resource.extend(value, i, j, Direction.FORWARD)
            if not resource.is_feasible(value, j, Direction.FORWARD):
                raise DecodeMismatch(f'tour {tour} violates {resource.name} at node {j}')
        consumptions.append(value)

    return Path(
        tour=tour,
        cost=cost,
        consumptions=tuple(consumptions),
        elementary=len(set(tour)) == len(tour),
        status=status,
    )


def _effective_scheme(config, cyclicity):
    scheme = Scheme(config.relaxation)
    if cyclicity == CyclicityClass.ACYCLIC:
        # no negative arc: the elementary optimum costs the same as the relaxed one
        return Scheme.DSSRC
    return scheme


def _run_passes(fw_pool, bw_pool, manager, hwp, deadline, config, stats, counters, bidirectional):
    def timed(pool, phase):
        start = time.perf_counter()
        with counters.time_phase(phase):
            run_direction_pass(pool, manager, hwp, deadline)
        stats.add_time(phase, time.perf_counter() - start)

    if bidirectional and config.parallel:
        with ThreadPoolExecutor(max_workers=2, thread_name_prefix='pathwise') as executor:
            forward = executor.submit(timed, fw_pool, 'forward')
            backward = executor.submit(timed, bw_pool, 'backward')
            forward.result()
            backward.result()
        return
    timed(fw_pool, 'forward')
    if bidirectional:
        timed(bw_pool, 'backward')


def solve(problem, config=None, counters=None):
    """
    Solve a problem.

    Args:
        problem (Problem): instance
        config (SolverConfig | None): defaults for the problem's cyclicity class
        counters (Counters | None): telemetry sink, created from config.telemetry

    Returns:
        tuple: (Path, SolveStats)
    """
    cyclicity = classify_cyclicity(problem)
    if config is None:
        config = SolverConfig.from_settings(cyclicity)
    config.validate()
    if counters is None:
        counters = Counters(enabled=config.telemetry)
    stats = SolveStats()
    started = time.perf_counter()
    deadline = time.monotonic() + config.time_limit

    if config.storage != 'auto':
        problem = problem.with_storage(config.storage)
    critical = problem.critical_resource
    if not critical.monotone:
        raise ConfigError(f'critical resource {critical.name} is not monotone', key='critical')

    n = problem.n
    scheme = _effective_scheme(config, cyclicity)
    masks = init_masks(scheme, problem, max(1, min(config.ng_size, n - 1)))
    if cyclicity == CyclicityClass.CYCLIC:
        free_nodes = resource_free_cycle_nodes(problem)
        if free_nodes:
            masks.seed(free_nodes)

    critical_bound = critical.critical_bound()
    bidirectional = config.direction == DirectionMode.BIDIRECTIONAL and math.isfinite(critical_bound)
    if config.direction == DirectionMode.BIDIRECTIONAL and not bidirectional:
        logger.info('critical resource is unbounded, running forward only')
    hwp = config.hwp * critical_bound if bidirectional else critical_bound

    manager = LabelManager(problem, masks.masks, unreachable=config.unreachable)
    incumbent = None
    guard = n * n + 1

    def finish(path):
        stats.add_time('total', time.perf_counter() - started)
        logger.info('%s: %s after %d iterations', problem, path, stats.iterations)
        return path, stats

    try:
        manager.initial_label(Direction.FORWARD)
        manager.initial_label(Direction.BACKWARD)
    except InfeasibleAtSource as e:
        logger.info('%s is infeasible at its endpoints: %s', problem, e)
        return finish(Path(status=PathStatus.INFEASIBLE))

    try:
        while True:
            stats.iterations += 1
            counters.record('relaxation_iterations')
            if stats.iterations > guard:
                raise NonTerminating(f'no elementary solution after {guard} iterations')
            if bidirectional:
                stats.hwp_history.append(hwp)

            manager.masks = list(masks.masks)
            fw_pool = LabelPool(n, Direction.FORWARD, config.selection, config.compress, counters)
            bw_pool = LabelPool(n, Direction.BACKWARD, config.selection, config.compress, counters)
            fw_pool.insert(manager.initial_label(Direction.FORWARD))
            if bidirectional:
                bw_pool.insert(manager.initial_label(Direction.BACKWARD))

            try:
                _run_passes(fw_pool, bw_pool, manager, hwp, deadline, config, stats, counters, bidirectional)
            finally:
                stats.labels_fw += fw_pool.generated
                stats.labels_bw += bw_pool.generated
                stats.dominated_fw += fw_pool.dominated_on_arrival
                stats.dominated_bw += bw_pool.dominated_on_arrival
            n_f, n_b = fw_pool.generated, bw_pool.generated

            join_start = time.perf_counter()
            with counters.time_phase('join'):
                bound = incumbent.cost if incumbent is not None else None
                best, attempts, successes = manager.join(fw_pool, bw_pool, bound, config.join, counters)
            stats.add_time('join', time.perf_counter() - join_start)
            stats.join_attempts += attempts
            stats.join_successes += successes

            if best is None:
                stats.relaxed_costs.append(None)
                if incumbent is None:
                    return finish(Path(status=PathStatus.INFEASIBLE))
                # every pair costs more than the elementary incumbent
                return finish(incumbent.with_status(PathStatus.OPTIMAL))

            path = extract_path(best.fw, best.bw, problem)
            stats.relaxed_costs.append(path.cost)
            if path.elementary and path.better_than(incumbent):
                incumbent = path
            stats.incumbents.append(incumbent.cost if incumbent is not None else None)
            logger.info(
                'iteration %d: relaxed cost %s, N_F %d, N_B %d, hwp %s',
                stats.iterations, path.cost, n_f, n_b, hwp,
            )

            if not config.elementary:
                status = PathStatus.OPTIMAL if path.elementary else PathStatus.FEASIBLE
                return finish(path.with_status(status))
            if incumbent is not None and incumbent.cost <= path.cost + TOLERANCE:
                return finish(incumbent.with_status(PathStatus.OPTIMAL))

            outcome = relaxation_step(masks, path.tour)
            if outcome == StepOutcome.DONE:
                status = PathStatus.OPTIMAL if path.elementary else PathStatus.FEASIBLE
                return finish(path.with_status(status))

            if bidirectional:
                hwp = update_hwp(hwp, n_f, n_b, critical_bound, config.hwp_step, config.hwp_threshold)
    except TimeLimitReached as e:
        logger.warning('%s: %s', problem, e)
        if incumbent is not None:
            return finish(incumbent.with_status(PathStatus.TIME_LIMIT))
        return finish(Path(status=PathStatus.TIME_LIMIT))

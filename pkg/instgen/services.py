"""
Instance generators.

generate builds prize collecting instances: every arc pays a prize
(negative cost) and paths are limited by two capacities, a node limit
and time windows. The depot is split in two: node 0 is the source and
node n, a copy of node 0, the destination.

random_problem and random_sparse_problem build the small random
families used to check the solver against the oracle.
"""

import logging
from pathlib import Path

import numpy as np

from graphs.models import ArcMap
from graphs.services import build_graph
from instgen.models import SERVICE_TIMES, PcGenSpec
from pathwise.exceptions import ParseError
from problems.models import Problem
from resources.kinds import Capacity, NodeLimit, Time, TimeWindows
from resources.models import ResourceData

logger = logging.getLogger(__name__)

COORDINATE_RANGE = 1000.0


def sample_windows(rng, count, wide_fraction=0.8):
    """
    Draw count time windows.

    Openings are uniform in (0, 1000). Wide windows stay open for
    100 * U(1, 4), narrow ones for 100 * U(0.1, 0.6).

    Args:
        rng (np.random.Generator): random source
        count (int): number of windows
        wide_fraction (float): probability of a wide window

    Returns:
        tuple: (opens, closes, wide) numpy arrays
    """
    wide = rng.uniform(size=count) < wide_fraction
    opens = rng.uniform(0.0, 1000.0, size=count)
    wide_length = 100.0 * rng.uniform(1.0, 4.0, size=count)
    narrow_length = 100.0 * rng.uniform(0.1, 0.6, size=count)
    closes = opens + np.where(wide, wide_length, narrow_length)
    return opens, closes, wide


def load_coordinates(path):
    """
    Read base nodes from a text file with one ``x y [demand]`` row per line.

    Blank lines and ``#`` comments are skipped.

    Returns:
        list: (x, y) or (x, y, demand) tuples
    """
    rows = []
    for number, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        text = raw.split('#', 1)[0].strip()
        if not text:
            continue
        tokens = text.split()
        if len(tokens) not in (2, 3):
            raise ParseError(f'expected "x y [demand]", got {len(tokens)} fields', line=number, path=str(path))
        try:
            rows.append(tuple(float(token) for token in tokens))
        except ValueError:
            raise ParseError(f'non-numeric field in {text!r}', line=number, path=str(path))
    return rows


def _base_nodes(spec, rng):
    """Coordinates and first-capacity demands of the n base nodes."""
    n = spec.n
    if spec.base_coordinates is None:
        points = rng.uniform(0.0, COORDINATE_RANGE, size=(n, 2))
        return points, rng.integers(1, 11, size=n).astype(float)

    rows = spec.base_coordinates[:n]
    points = np.array([row[:2] for row in rows], dtype=float)
    drawn = rng.integers(1, 11, size=n).astype(float)
    demands = np.array([row[2] if len(row) > 2 else drawn[k] for k, row in enumerate(rows)], dtype=float)
    return points, demands


def generate(spec, storage=None):
    """
    Build a prize collecting instance from a PcGenSpec.

    All randomness comes from one generator seeded with spec.seed, so the
    same spec always yields the same instance.

    Returns:
        Problem
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    total = n + 1
    sink = n

    points, demands_1 = _base_nodes(spec, rng)
    demands_2 = rng.integers(1, 11, size=n).astype(float)
    bound_2 = float(rng.uniform(0.8 * spec.C, 1.2 * spec.C))
    service = rng.choice(SERVICE_TIMES, size=n).astype(float)
    opens, closes, _ = sample_windows(rng, n, spec.wide_tw_fraction)

    points = np.vstack([points, points[:1]])
    deltas = points[:, None, :] - points[None, :, :]
    distances = np.rint(np.sqrt((deltas ** 2).sum(axis=2)))

    arcs = [
        (i, j) for i in range(n) for j in range(1, total)
        if i != j and (i, j) != (0, sink)
    ]
    graph = build_graph(total, arcs, 0, sink, mode=storage, coordinates=points.tolist())
    mode = graph.storage_mode
    cost = ArcMap.from_items(total, mode, ((arc, -max(1.0, distances[arc])) for arc in arcs))
    times = ArcMap.from_items(total, mode, ((arc, distances[arc] / 100.0) for arc in arcs))

    depots = (0, sink)
    demands_1 = np.append(demands_1, 0.0)
    demands_2 = np.append(demands_2, 0.0)
    service = np.append(service, 0.0)
    opens = np.append(opens, 0.0)
    # enough time to serve every customer inside its window
    closes = np.append(np.maximum(closes, opens[:n] + service[:n]), 0.0)
    for depot in depots:
        demands_1[depot] = demands_2[depot] = service[depot] = 0.0

    customers = range(1, n)
    horizon = max((closes[k] + service[k] for k in customers), default=0.0)
    horizon += max(distances[arc] / 100.0 for arc in arcs)
    windows = [(float(opens[k]), float(closes[k])) for k in range(total)]
    for depot in depots:
        windows[depot] = (0.0, horizon)

    resources = [
        Capacity(ResourceData(upper_bound=float(spec.C), node_consumption=demands_1.tolist()), 'capacity 1'),
        Capacity(ResourceData(upper_bound=bound_2, node_consumption=demands_2.tolist()), 'capacity 2'),
        NodeLimit(ResourceData(upper_bound=float(spec.NL), node_consumption=[0.0] * total)),
        TimeWindows(ResourceData(
            upper_bound=horizon,
            node_consumption=[0.0] * total,
            arc_consumption=times,
            windows=windows,
            service=service.tolist(),
        )),
    ]
    problem = Problem(graph, cost, resources, name=spec.name, critical=0)
    logger.info('generated %s with %d arcs', problem, graph.arc_count)
    return problem


def random_problem(seed, n, negative_fraction=0.3, storage=None):
    """
    Complete digraph with integer costs in [1, 10], a share of them negated,
    and one capacity resource.

    Source is node 0 and destination node n - 1. No arc enters the source
    or leaves the destination.
    """
    rng = np.random.default_rng(seed)
    source, destination = 0, n - 1
    arcs = [
        (i, j) for i in range(n) for j in range(n)
        if i != j and j != source and i != destination
    ]
    magnitudes = rng.integers(1, 11, size=len(arcs)).astype(float)
    signs = np.where(rng.uniform(size=len(arcs)) < negative_fraction, -1.0, 1.0)
    demands = rng.integers(1, 4, size=n).astype(float)
    demands[[source, destination]] = 0.0
    bound = float(rng.integers(2, 2 * n + 1))

    graph = build_graph(n, arcs, source, destination, mode=storage)
    cost = ArcMap.from_items(n, graph.storage_mode, zip(arcs, (magnitudes * signs).tolist()))
    capacity = Capacity(ResourceData(upper_bound=bound, node_consumption=demands.tolist()))
    return Problem(graph, cost, [capacity], name=f'random-n{n}-s{seed}')


def random_sparse_problem(seed, n, density=0.3, storage=None):
    """
    Acyclic instance: arcs only go from lower to higher ids, each with
    probability density, plus the chain i -> i + 1. Costs are positive
    and one time resource limits the path.
    """
    rng = np.random.default_rng(seed)
    arcs = [
        (i, j) for i in range(n) for j in range(i + 1, n)
        if j == i + 1 or rng.uniform() < density
    ]
    costs = rng.integers(1, 21, size=len(arcs)).astype(float)
    durations = rng.integers(1, 6, size=len(arcs)).astype(float)
    bound = float(rng.integers(n, 3 * n + 1))

    graph = build_graph(n, arcs, 0, n - 1, mode=storage)
    mode = graph.storage_mode
    cost = ArcMap.from_items(n, mode, zip(arcs, costs.tolist()))
    time = Time(ResourceData(
        upper_bound=bound,
        node_consumption=[0.0] * n,
        arc_consumption=ArcMap.from_items(n, mode, zip(arcs, durations.tolist())),
        service=[0.0] * n,
    ))
    return Problem(graph, cost, [time], name=f'sparse-n{n}-s{seed}')

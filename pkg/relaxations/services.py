"""
Relaxation controllers: mask initialization, cycle detection and the
per-iteration update rules of DSSR, DSSRC, NG, NGC and their hybrids.
"""

import logging

import numpy as np

from pathwise.exceptions import InvalidNgSize, NonTerminating
from relaxations.models import CycleReport, NeighborhoodMasks, Scheme, StepOutcome

logger = logging.getLogger(__name__)


def ng_distances(problem):
    """
    Node to node closeness used to build NG neighbourhoods.

    Euclidean distance when the graph has coordinates, otherwise the
    smallest absolute arc cost between the two nodes in either direction
    (infinite when they are not adjacent).
    """
    n = problem.n
    coordinates = problem.graph.coordinates
    if coordinates is not None:
        points = np.asarray(coordinates, dtype=float)
        deltas = points[:, None, :] - points[None, :, :]
        return np.sqrt((deltas ** 2).sum(axis=2))

    distances = np.full((n, n), np.inf)
    for (i, j), value in problem.cost.items():
        distance = abs(value)
        distances[i, j] = min(distances[i, j], distance)
        distances[j, i] = min(distances[j, i], distance)
    return distances


def ng_neighborhoods(problem, ng_size):
    """Bit set per node: itself plus its ng_size closest nodes."""
    distances = ng_distances(problem)
    neighborhoods = []
    for node in range(problem.n):
        row = distances[node].copy()
        row[node] = np.inf
        order = np.argsort(row, kind='stable')
        bits = 1 << node
        for other in order[:ng_size]:
            if np.isfinite(row[other]):
                bits |= 1 << int(other)
        neighborhoods.append(bits)
    return neighborhoods


def init_masks(scheme, problem, ng_size):
    """
    Initial masks for a scheme.

    DSSR schemes and the NGC family start from the self bit only; NG and
    NG-DSSRC start from the full neighbourhoods.

    Returns:
        NeighborhoodMasks
    """
    scheme = Scheme(scheme)
    n = problem.n
    self_only = [1 << node for node in range(n)]
    if not scheme.ng_based:
        return NeighborhoodMasks(scheme, self_only)

    if ng_size < 1 or ng_size > n:
        raise InvalidNgSize(f'ng_size must be in [1, {n}], got {ng_size}')
    neighborhoods = ng_neighborhoods(problem, ng_size)
    if scheme in (Scheme.NG, Scheme.NG_DSSRC):
        return NeighborhoodMasks(scheme, neighborhoods, ng_base=neighborhoods)
    return NeighborhoodMasks(scheme, self_only, ng_base=neighborhoods)


def detect_cycles(tour):
    """
    Repeated nodes of a tour, in order of first appearance, with the
    inclusive span between their first and last occurrence.
    """
    first = {}
    last = {}
    for position, node in enumerate(tour):
        first.setdefault(node, position)
        last[node] = position
    report = CycleReport()
    for node, position in sorted(first.items(), key=lambda item: item[1]):
        if last[node] > position:
            report.repeated_nodes.append(node)
            report.loop_spans[node] = list(tour[position:last[node] + 1])
    return report


def update_masks(masks, report):
    """
    Grow masks from a cycle report.

    DSSR adds every repeated node to every mask. DSSRC adds a repeated
    node to the masks of the nodes on its loop span. NGC does the same
    but only where the node belongs to the NG neighbourhood. NG never
    changes. Bits are only ever set.

    Returns:
        tuple: (masks, changed)
    """
    before = list(masks.masks)
    scheme = masks.scheme

    if scheme == Scheme.DSSR and not masks.handed_off:
        bits = 0
        for node in report.repeated_nodes:
            bits |= 1 << node
        masks.masks = [mask | bits for mask in masks.masks]
    elif masks.handed_off or scheme == Scheme.DSSRC:
        for node, span in report.loop_spans.items():
            for k in span:
                masks.masks[k] |= 1 << node
    elif scheme in (Scheme.NGC, Scheme.NGC_DSSRC):
        for node, span in report.loop_spans.items():
            for k in span:
                if masks.ng_base[k] >> node & 1:
                    masks.masks[k] |= 1 << node

    changed = masks.masks != before
    return masks, changed


def relaxation_step(masks, tour):
    """
    Decide what follows a relaxed optimum with the given tour.

    Elementary tours finish every scheme. Otherwise DSSR and DSSRC grow
    their masks and repeat, NG stops, NGC repeats until its masks stop
    changing, and the hybrids hand off to unrestricted DSSRC rounds.
    A handoff applies the first DSSRC update before returning.

    Returns:
        StepOutcome
    """
    masks.iteration += 1
    report = detect_cycles(tour)
    if report.is_elementary:
        return StepOutcome.DONE

    scheme = masks.scheme
    if scheme == Scheme.NG:
        return StepOutcome.DONE

    if masks.handed_off or scheme in (Scheme.DSSR, Scheme.DSSRC):
        _, changed = update_masks(masks, report)
        if not changed:
            raise NonTerminating(
                f'masks already forbid repeating {report.repeated_nodes} in tour {tour}'
            )
        return StepOutcome.REPEAT

    if scheme in (Scheme.NGC, Scheme.NGC_DSSRC):
        _, changed = update_masks(masks, report)
        if changed:
            return StepOutcome.REPEAT
        if scheme == Scheme.NGC:
            return StepOutcome.DONE

    logger.info('%s hands off to DSSRC after %d iterations', scheme.label, masks.iteration)
    masks.handed_off = True
    _, changed = update_masks(masks, report)
    if not changed:
        raise NonTerminating(f'handoff could not grow masks for tour {tour}')
    return StepOutcome.HANDOFF

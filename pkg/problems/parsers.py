"""
Instance file readers and the native writer.

Native grammar (line oriented, ``#`` starts a comment)::

    NAME <text>
    NODES <n>
    SOURCE <i>
    DEST <j>
    COORD <i> <x> <y>
    ARCS
    <i> <j> <cost> [<time>]
    RESOURCE <kind> <lb> <ub>
    NODE <i> <consumption>
    ARC <i> <j> <consumption>
    TW <i> <open> <close> <service>
    SERVICE <i> <service>
    CRITICAL <resource index>

``kind`` is one of CAPACITY, TIME, NODELIMIT, TIMEWINDOWS. Time based
resources without ARC lines take their arc consumption from the optional
time column of the ARCS section.
"""

import logging
import math
from pathlib import Path

from django.conf import settings

from graphs.models import ArcMap
from graphs.services import build_graph
from pathwise.exceptions import (
    GraphError, InconsistentData, ParseError, ResourceError, UnknownNode,
)
from problems.models import Problem
from problems.services import validate
from resources.kinds import make_resource
from resources.models import ResourceData, ResourceKind

logger = logging.getLogger(__name__)

HEADER_KEYWORDS = {'NAME', 'NODES', 'SOURCE', 'DEST', 'COORD', 'ARCS', 'RESOURCE', 'CRITICAL'}
RESOURCE_KEYWORDS = {'NODE', 'ARC', 'TW', 'SERVICE'}
SINGLETON_KINDS = {ResourceKind.NODE_LIMIT, ResourceKind.TIME, ResourceKind.TIME_WINDOWS}
TIME_KINDS = {ResourceKind.TIME, ResourceKind.TIME_WINDOWS}


class _Line:
    """One significant input line split into tokens with their columns."""

    def __init__(self, number, text, path):
        self.line_number = number
        self.path = path
        body = text.split('#', 1)[0]
        self.tokens = []
        self.columns = []
        position = 0
        for token in body.split():
            position = body.index(token, position)
            self.tokens.append(token)
            self.columns.append(position + 1)
            position += len(token)

    def error(self, message, index=None):
        column = self.columns[index] if index is not None and index < len(self.columns) else None
        return ParseError(message, line=self.line_number, column=column, path=self.path)

    def expect(self, count, usage):
        if len(self.tokens) != count:
            raise self.error(f'expected "{usage}"')

    def integer(self, index):
        try:
            return int(self.tokens[index])
        except ValueError:
            raise self.error(f'expected an integer, got {self.tokens[index]!r}', index)

    def number(self, index, allow_infinite=False):
        try:
            value = float(self.tokens[index])
        except ValueError:
            raise self.error(f'expected a number, got {self.tokens[index]!r}', index)
        if math.isnan(value) or (math.isinf(value) and not allow_infinite):
            raise self.error(f'non-finite value {self.tokens[index]!r}', index)
        return value


def _significant_lines(text, path):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _Line(number, raw, path)
        if line.tokens:
            yield line


def _collect_arcs(raw_arcs, warnings):
    """
    Drop self-loops and collapse duplicates, keeping the cheapest copy.

    raw_arcs yields (i, j, cost, extra) tuples.
    """
    kept = {}
    for i, j, cost, extra in raw_arcs:
        if i == j:
            message = f'dropped self-loop on node {i}'
            logger.warning(message)
            warnings.append(message)
            continue
        if (i, j) in kept:
            message = f'collapsed duplicate arc ({i}, {j})'
            logger.warning(message)
            warnings.append(message)
            if cost >= kept[(i, j)][0]:
                continue
        kept[(i, j)] = (cost, extra)
    return kept


def _storage(storage):
    if storage is None:
        storage = settings.PATHWISE.get('storage', 'auto')
    return storage


class _ResourceSection:

    def __init__(self, kind, lower_bound, upper_bound, line):
        self.kind = kind
        self.lower_bound = lower_bound
        self.upper_bound = upper_bound
        self.line = line
        self.nodes = {}
        self.arcs = {}
        self.windows = {}
        self.service = {}


def parse_native(text, path=None, storage=None, default_critical=None,
                 density_threshold=None, small_n_threshold=None):
    """
    Parse native instance text into a Problem.

    Args:
        text (str): file content
        path (str | None): file name used in error messages
        storage (str | None): storage override, defaults to the configured mode
        density_threshold, small_n_threshold: automatic storage selection,
            defaults to the configured values
        default_critical (callable | None): picks the critical index from the
            resource kinds when no CRITICAL line is present

    Returns:
        Problem
    """
    name = ''
    n = source = destination = critical = None
    coordinates = {}
    raw_arcs = []
    sections = []
    section = None
    warnings = []

    for line in _significant_lines(text, path):
        keyword = line.tokens[0].upper()

        if keyword in HEADER_KEYWORDS:
            section = None
            if keyword == 'NAME':
                name = ' '.join(line.tokens[1:])
            elif keyword in ('NODES', 'SOURCE', 'DEST', 'CRITICAL'):
                line.expect(2, f'{keyword} <integer>')
                value = line.integer(1)
                if value < 0:
                    raise line.error(f'{keyword} must be non-negative', 1)
                if keyword == 'NODES':
                    n = value
                elif keyword == 'SOURCE':
                    source = value
                elif keyword == 'DEST':
                    destination = value
                else:
                    critical = value
            elif keyword == 'COORD':
                line.expect(4, 'COORD <i> <x> <y>')
                coordinates[line.integer(1)] = (line.number(2), line.number(3))
            elif keyword == 'ARCS':
                line.expect(1, 'ARCS')
                section = 'ARCS'
            else:
                line.expect(4, 'RESOURCE <kind> <lb> <ub>')
                try:
                    kind = ResourceKind(line.tokens[1].lower())
                except ValueError:
                    raise line.error(f'unknown resource kind {line.tokens[1]!r}', 1)
                if kind == ResourceKind.CUSTOM:
                    raise line.error('custom resources cannot be declared in instance files', 1)
                lower_bound = line.number(2)
                upper_bound = line.number(3, allow_infinite=True)
                if lower_bound < 0 or upper_bound < 0:
                    raise line.error('resource bounds must be non-negative', 2)
                if kind in SINGLETON_KINDS and any(s.kind == kind for s in sections):
                    raise InconsistentData(f'line {line.line_number}: duplicate {kind.label} resource')
                section = _ResourceSection(kind, lower_bound, upper_bound, line.line_number)
                sections.append(section)
            continue

        if section == 'ARCS':
            if len(line.tokens) not in (3, 4):
                raise line.error('expected "<i> <j> <cost> [<time>]"')
            time = line.number(3) if len(line.tokens) == 4 else None
            raw_arcs.append((line.integer(0), line.integer(1), line.number(2), time))
        elif isinstance(section, _ResourceSection) and keyword in RESOURCE_KEYWORDS:
            if keyword == 'NODE':
                line.expect(3, 'NODE <i> <consumption>')
                section.nodes[line.integer(1)] = (line.number(2), line)
            elif keyword == 'ARC':
                line.expect(4, 'ARC <i> <j> <consumption>')
                section.arcs[(line.integer(1), line.integer(2))] = (line.number(3), line)
            elif keyword == 'TW':
                if section.kind != ResourceKind.TIME_WINDOWS:
                    raise line.error('TW lines belong to TIMEWINDOWS resources', 0)
                line.expect(5, 'TW <i> <open> <close> <service>')
                node = line.integer(1)
                section.windows[node] = ((line.number(2), line.number(3)), line)
                section.service[node] = (line.number(4), line)
            else:
                if section.kind not in TIME_KINDS:
                    raise line.error('SERVICE lines belong to time resources', 0)
                line.expect(3, 'SERVICE <i> <service>')
                section.service[line.integer(1)] = (line.number(2), line)
        else:
            raise line.error(f'unexpected {line.tokens[0]!r}', 0)

    for value, keyword in ((n, 'NODES'), (source, 'SOURCE'), (destination, 'DEST')):
        if value is None:
            raise ParseError(f'missing {keyword} line', path=path)
    if not sections:
        raise InconsistentData('no RESOURCE section')

    for node in coordinates:
        if not 0 <= node < n:
            raise InconsistentData(f'coordinate for unknown node {node}')
    if coordinates and len(coordinates) != n:
        raise InconsistentData(f'coordinates given for {len(coordinates)} of {n} nodes')
    for i, j, _, _ in raw_arcs:
        if not (0 <= i < n and 0 <= j < n):
            raise InconsistentData(f'arc ({i}, {j}) has an endpoint outside [0, {n})')

    kept = _collect_arcs(raw_arcs, warnings)
    try:
        graph = build_graph(
            n, kept, source, destination, mode=_storage(storage),
            density_threshold=density_threshold, small_n_threshold=small_n_threshold,
            coordinates=[coordinates[i] for i in range(n)] if coordinates else None,
        )
    except GraphError as e:
        raise InconsistentData(str(e))
    mode = graph.storage_mode
    cost = ArcMap.from_items(n, mode, ((arc, value[0]) for arc, value in sorted(kept.items())))
    has_time_column = any(extra is not None for _, extra in kept.values())

    resources = []
    for section in sections:
        resources.append(_build_resource(section, graph, kept, has_time_column))

    if critical is None:
        critical = default_critical([r.kind for r in resources]) if default_critical else 0
    problem = Problem(graph, cost, resources, name=name, critical=critical, warnings=warnings)
    validate(problem)
    return problem


def _build_resource(section, graph, kept, has_time_column):
    n = graph.n
    mode = graph.storage_mode

    node_consumption = [0.0] * n
    for node, (value, line) in section.nodes.items():
        if not 0 <= node < n:
            raise InconsistentData(f'line {line.line_number}: consumption for unknown node {node}')
        node_consumption[node] = value

    arc_consumption = None
    if section.arcs:
        arc_consumption = ArcMap(n, mode)
        for (i, j), (value, line) in sorted(section.arcs.items()):
            if (i, j) not in kept:
                raise InconsistentData(f'line {line.line_number}: consumption for unknown arc ({i}, {j})')
            arc_consumption.set(i, j, value)
    elif section.kind in TIME_KINDS and has_time_column:
        arc_consumption = ArcMap.from_items(
            n, mode, ((arc, extra or 0.0) for arc, (_, extra) in sorted(kept.items()))
        )

    windows = service = None
    if section.kind in TIME_KINDS:
        service = [0.0] * n
        for node, (value, line) in section.service.items():
            if not 0 <= node < n:
                raise InconsistentData(f'line {line.line_number}: service for unknown node {node}')
            service[node] = value
    if section.kind == ResourceKind.TIME_WINDOWS:
        windows = [(0.0, section.upper_bound)] * n
        for node, (window, line) in section.windows.items():
            if not 0 <= node < n:
                raise InconsistentData(f'line {line.line_number}: window for unknown node {node}')
            windows[node] = window

    data = ResourceData(
        lower_bound=section.lower_bound,
        upper_bound=section.upper_bound,
        node_consumption=node_consumption,
        arc_consumption=arc_consumption,
        windows=windows,
        service=service,
    )
    try:
        data.validate(n)
        return make_resource(section.kind, data)
    except ResourceError as e:
        raise InconsistentData(f'resource declared on line {section.line}: {e}')


def load_native(path, storage=None, density_threshold=None, small_n_threshold=None):
    """Read a native instance file."""
    return parse_native(
        Path(path).read_text(), path=str(path), storage=storage,
        density_threshold=density_threshold, small_n_threshold=small_n_threshold,
    )


def format_number(value):
    value = float(value)
    if math.isfinite(value) and value.is_integer():
        return str(int(value))
    return repr(value)


def write_native(problem):
    """
    Serialize a Problem to native text.

    Only non-zero node and arc consumptions are written.

    Returns:
        str
    """
    graph = problem.graph
    lines = []
    if problem.name:
        lines.append(f'NAME {problem.name}')
    lines.append(f'NODES {graph.n}')
    lines.append(f'SOURCE {graph.source}')
    lines.append(f'DEST {graph.destination}')
    if graph.coordinates is not None:
        for node, (x, y) in enumerate(graph.coordinates):
            lines.append(f'COORD {node} {format_number(x)} {format_number(y)}')

    lines.append('ARCS')
    for (i, j), value in problem.cost.items():
        lines.append(f'{i} {j} {format_number(value)}')

    for resource in problem.resources:
        data = resource.data
        lines.append(
            f'RESOURCE {resource.kind.value.upper()} '
            f'{format_number(data.lower_bound)} {format_number(data.upper_bound)}'
        )
        for node in range(graph.n):
            if data.node(node):
                lines.append(f'NODE {node} {format_number(data.node(node))}')
        if data.arc_consumption is not None:
            for (i, j), value in data.arc_consumption.items():
                if value:
                    lines.append(f'ARC {i} {j} {format_number(value)}')
        if resource.kind == ResourceKind.TIME_WINDOWS:
            for node, (open_, close) in enumerate(data.windows):
                lines.append(
                    f'TW {node} {format_number(open_)} {format_number(close)} '
                    f'{format_number(data.service_time(node))}'
                )
        elif resource.kind == ResourceKind.TIME:
            for node in range(graph.n):
                if data.service_time(node):
                    lines.append(f'SERVICE {node} {format_number(data.service_time(node))}')

    lines.append(f'CRITICAL {problem.critical}')
    return '\n'.join(lines) + '\n'


def _first_capacity(kinds):
    return next(index for index, kind in enumerate(kinds) if kind == ResourceKind.CAPACITY)


def load_pc(path, storage=None, density_threshold=None, small_n_threshold=None):
    """
    Read a prize collecting instance.

    The file must declare two capacities, a node limit and time windows.
    The first capacity is critical unless the file says otherwise.
    """
    text = Path(path).read_text()
    kinds = _declared_kinds(text, str(path))
    expected = sorted([ResourceKind.CAPACITY, ResourceKind.CAPACITY,
                       ResourceKind.NODE_LIMIT, ResourceKind.TIME_WINDOWS])
    if sorted(kinds) != expected:
        raise InconsistentData(
            f'prize collecting instances need 2 capacities, a node limit and time windows, '
            f'got {", ".join(k.value for k in kinds) or "none"}'
        )
    problem = parse_native(
        text, path=str(path), storage=storage, default_critical=_first_capacity,
        density_threshold=density_threshold, small_n_threshold=small_n_threshold,
    )
    positive = sum(1 for _, value in problem.cost.items() if value >= 0)
    if positive:
        message = f'{positive} arcs with non-negative cost in a prize collecting instance'
        logger.warning(message)
        problem.warnings.append(message)
    return problem


def _declared_kinds(text, path):
    kinds = []
    for line in _significant_lines(text, path):
        if line.tokens[0].upper() == 'RESOURCE' and len(line.tokens) > 1:
            try:
                kinds.append(ResourceKind(line.tokens[1].lower()))
            except ValueError:
                raise line.error(f'unknown resource kind {line.tokens[1]!r}', 1)
    return kinds


# ==============================
# DIMACS shortest path challenge
# ==============================

def _read_dimacs_arcs(path):
    """Return (n, declared arc count, [(u, v, w)]) with 0-based ids."""
    n = declared = None
    arcs = []
    for line in _significant_lines(Path(path).read_text(), str(path)):
        tag = line.tokens[0]
        if tag == 'c':
            continue
        if tag == 'p':
            if len(line.tokens) != 4 or line.tokens[1] != 'sp':
                raise line.error('expected "p sp <n> <m>"')
            if n is not None:
                raise line.error('duplicate problem line')
            n, declared = line.integer(2), line.integer(3)
        elif tag == 'a':
            if n is None:
                raise line.error('arc before the problem line')
            line.expect(4, 'a <u> <v> <w>')
            u, v = line.integer(1), line.integer(2)
            for index, node in ((1, u), (2, v)):
                if not 1 <= node <= n:
                    raise line.error(f'node {node} outside [1, {n}]', index)
            arcs.append((u - 1, v - 1, line.number(3)))
        else:
            raise line.error(f'unknown line type {tag!r}', 0)
    if n is None:
        raise ParseError('missing "p sp" line', path=str(path))
    if declared != len(arcs):
        logger.warning('%s declares %d arcs but lists %d', path, declared, len(arcs))
    return n, declared, arcs


def _read_dimacs_coordinates(path, n):
    coordinates = [None] * n
    for line in _significant_lines(Path(path).read_text(), str(path)):
        tag = line.tokens[0]
        if tag in ('c', 'p'):
            continue
        if tag != 'v':
            raise line.error(f'unknown line type {tag!r}', 0)
        line.expect(4, 'v <id> <x> <y>')
        node = line.integer(1)
        if not 1 <= node <= n:
            raise line.error(f'node {node} outside [1, {n}]', 1)
        coordinates[node - 1] = (line.number(2), line.number(3))
    if any(c is None for c in coordinates):
        raise InconsistentData(f'{path}: coordinates missing for some nodes')
    return coordinates


def load_dimacs(gr_path, source, destination, resource_bound, co_path=None,
                time_path=None, divisor=None, storage=None, density_threshold=None,
                small_n_threshold=None):
    """
    Read a DIMACS ``.gr`` network as a single time resource problem.

    Node ids are 1-based in the files and 0-based in the returned Problem;
    source and destination are given 0-based.

    Args:
        gr_path: distance graph, arc weights become costs
        source (int): origin node
        destination (int): destination node
        resource_bound (float): time upper bound
        co_path: optional coordinate file
        time_path: optional second ``.gr`` file with the same arcs carrying times
        divisor (float | None): time = weight / divisor when no time file is given

    Returns:
        Problem
    """
    if resource_bound < 0 or math.isnan(resource_bound):
        raise ParseError(f'resource bound must be non-negative, got {resource_bound}')
    if divisor is None:
        divisor = settings.PATHWISE.get('dimacs_time_divisor', 1.0)
    if divisor <= 0:
        raise InconsistentData(f'time divisor must be positive, got {divisor}')

    n, _, arcs = _read_dimacs_arcs(gr_path)
    for node, label in ((source, 'source'), (destination, 'destination')):
        if not 0 <= node < n:
            raise UnknownNode(f'{label} {node} outside [0, {n})')

    warnings = []
    kept = _collect_arcs(((u, v, w, None) for u, v, w in arcs), warnings)

    if time_path is not None:
        time_n, _, time_arcs = _read_dimacs_arcs(time_path)
        if time_n != n:
            raise InconsistentData(f'{time_path} has {time_n} nodes, expected {n}')
        times = {}
        for u, v, t in time_arcs:
            if (u, v) in kept:
                times[(u, v)] = min(t, times.get((u, v), math.inf))
        missing = [arc for arc in kept if arc not in times]
        if missing:
            raise InconsistentData(f'{time_path}: no time for arc {missing[0]}')
    else:
        times = {arc: value[0] / divisor for arc, value in kept.items()}

    coordinates = _read_dimacs_coordinates(co_path, n) if co_path is not None else None
    try:
        graph = build_graph(
            n, kept, source, destination, mode=_storage(storage), coordinates=coordinates,
            density_threshold=density_threshold, small_n_threshold=small_n_threshold,
        )
    except GraphError as e:
        raise InconsistentData(str(e))
    mode = graph.storage_mode
    cost = ArcMap.from_items(n, mode, ((arc, value[0]) for arc, value in sorted(kept.items())))
    time = make_resource(ResourceKind.TIME, ResourceData(
        upper_bound=float(resource_bound),
        node_consumption=[0.0] * n,
        arc_consumption=ArcMap.from_items(n, mode, sorted(times.items())),
        service=[0.0] * n,
    ))
    problem = Problem(graph, cost, [time], name=Path(gr_path).stem, warnings=warnings)
    validate(problem)
    logger.info('loaded %s: %d nodes, %d arcs', gr_path, n, graph.arc_count)
    return problem

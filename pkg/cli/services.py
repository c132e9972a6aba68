"""
Command line runs: load or generate an instance, solve it, and write
the solution with its statistics as text or Json.
"""

import logging
from contextlib import contextmanager
from pathlib import Path

from rest_framework.renderers import JSONRenderer

from cli.config import load_config
from cli.models import ExitCode, InstanceFormat, Subcommand
from instgen.services import generate, load_coordinates
from oracle.services import enumerate_paths
from pathwise.exceptions import ConfigError
from problems.parsers import format_number, load_dimacs, load_native, load_pc, write_native
from problems.services import classify_cyclicity, has_negative_cycle, validate
from solver.models import PathStatus
from solver.serializers import SolveReportSerializer
from solver.services import solve
from telemetry.models import Counters, ReportFormat
from telemetry.services import report, report_data

logger = logging.getLogger(__name__)


@contextmanager
def log_file_handler(path):
    """Copy every log record to path while the block runs."""
    if not path:
        yield
        return
    handler = logging.FileHandler(path)
    handler.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(name)s: %(message)s'))
    root = logging.getLogger()
    previous_level = root.level
    root.addHandler(handler)
    root.setLevel(min(previous_level, logging.INFO))
    try:
        yield
    finally:
        root.removeHandler(handler)
        root.setLevel(previous_level)
        handler.close()


def load_problem(invocation, config):
    """
    Read the instance an invocation names, in its format.

    Storage selection and the DIMACS time divisor come from config.
    """
    options = {
        'storage': config.storage,
        'density_threshold': config.density_threshold,
        'small_n_threshold': config.small_n_threshold,
    }
    instance_format = InstanceFormat(invocation.format)
    if instance_format == InstanceFormat.NATIVE:
        return load_native(invocation.instance, **options)
    if instance_format == InstanceFormat.PC:
        return load_pc(invocation.instance, **options)

    for key in ('source', 'dest', 'bound'):
        if getattr(invocation, key) is None:
            raise ConfigError('required for DIMACS instances', key=key)
    return load_dimacs(
        invocation.instance, invocation.source, invocation.dest, invocation.bound,
        co_path=invocation.coords, time_path=invocation.time_file,
        divisor=config.dimacs_time_divisor, **options,
    )


def _format_list(values):
    return ' '.join(format_number(value) for value in values) or '-'


def render_text(path, stats, counters, config):
    lines = [
        f'status {PathStatus(path.status).value}',
        f'cost {format_number(path.cost) if path.cost is not None else "none"}',
        f'tour {_format_list(path.tour)}',
        f'consumptions {_format_list(path.consumptions)}',
        f'elementary {str(path.elementary).lower()}',
        f'iterations {stats.iterations}',
        f'seed {config.seed}',
    ]
    text = '\n'.join(lines) + '\n'
    if config.telemetry:
        text += report(counters, ReportFormat.TEXT, include_timers=config.report_timers)
    return text


def render_json(path, stats, counters, config):
    """Path, stats and telemetry in one document; timings only when asked for."""
    data = {'path': path, 'stats': stats, 'seed': config.seed}
    if config.telemetry:
        data['telemetry'] = report_data(counters, include_timers=config.report_timers)
    payload = SolveReportSerializer(data).data
    if not config.report_timers:
        payload['stats'].pop('phase_times', None)
    return JSONRenderer().render(payload).decode() + '\n'


def run_solve(invocation):
    """
    Solve the instance of an invocation.

    Returns:
        tuple: (output text, ExitCode)
    """
    base = load_config(invocation.config_path, invocation.overrides)
    problem = load_problem(invocation, base)
    config = load_config(invocation.config_path, invocation.overrides, classify_cyclicity(problem))
    if invocation.json:
        config.report_format = ReportFormat.JSON

    with log_file_handler(config.log_file):
        counters = Counters(enabled=config.telemetry)
        path, stats = solve(problem, config, counters)

    if config.report_format == ReportFormat.JSON:
        text = render_json(path, stats, counters, config)
    else:
        text = render_text(path, stats, counters, config)
    return text, ExitCode.for_status(path.status)


def run_oracle(invocation, node_cap):
    base = load_config(invocation.config_path, invocation.overrides)
    problem = load_problem(invocation, base)
    result = enumerate_paths(problem, node_cap)
    if not result.feasible:
        text = f'status infeasible\npaths {result.paths_enumerated}\n'
        return text, ExitCode.INFEASIBLE
    text = (
        f'cost {format_number(result.optimal_cost)}\n'
        f'tour {_format_list(result.optimal_tour)}\n'
        f'paths {result.paths_enumerated}\n'
    )
    return text, ExitCode.OK


def run_validate(invocation):
    base = load_config(invocation.config_path, invocation.overrides)
    problem = validate(load_problem(invocation, base))
    lines = [
        f'name {problem.name or "-"}',
        f'nodes {problem.n}',
        f'arcs {problem.graph.arc_count}',
        f'storage {problem.graph.storage_mode.value}',
        f'density {problem.graph.density:.4f}',
        f'resources {" ".join(r.kind.value for r in problem.resources)}',
        f'critical {problem.critical}',
        f'cyclicity {classify_cyclicity(problem).value}',
        f'negative_cycle {str(has_negative_cycle(problem)).lower()}',
    ]
    lines.extend(f'warning {message}' for message in problem.warnings)
    return '\n'.join(lines) + '\n', ExitCode.OK


def run_gen_pc(spec, coords=None):
    if coords:
        spec.base_coordinates = load_coordinates(coords)
    return write_native(generate(spec)), ExitCode.OK


def write_output(text, out=None, stdout=None):
    """Write text to the out file, or to stdout when out is not given."""
    if out:
        Path(out).write_text(text)
        logger.info('wrote %s', out)
    elif stdout is not None:
        stdout.write(text, ending='')


def run(invocation, stdout=None, **extra):
    """
    Execute an invocation and write its output.

    extra carries subcommand specific values: node_cap for oracle, spec
    for gen_pc.

    Returns:
        ExitCode
    """
    subcommand = Subcommand(invocation.subcommand)
    if subcommand == Subcommand.SOLVE:
        text, code = run_solve(invocation)
    elif subcommand == Subcommand.ORACLE:
        text, code = run_oracle(invocation, extra['node_cap'])
    elif subcommand == Subcommand.VALIDATE:
        text, code = run_validate(invocation)
    else:
        text, code = run_gen_pc(extra['spec'], invocation.coords)
    write_output(text, invocation.out, stdout)
    return code

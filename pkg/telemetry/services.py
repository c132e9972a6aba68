"""
Telemetry reports.
"""

import io
import logging

from rest_framework.exceptions import ParseError
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from pathwise.exceptions import PathwiseError
from telemetry.models import REPORT_SCHEMA_VERSION, ReportFormat
from telemetry.serializers import TelemetryReportSerializer

logger = logging.getLogger(__name__)


def report_data(counters, include_timers=True):
    snapshot = counters.snapshot()
    data = {
        'schema_version': REPORT_SCHEMA_VERSION,
        'counters': dict(sorted(snapshot['counters'].items())),
    }
    if include_timers:
        data['timers'] = dict(sorted(snapshot['timers'].items()))
    return TelemetryReportSerializer(data).data


def report(counters, format=ReportFormat.TEXT, include_timers=True):
    """
    Serialize counters.

    Text reports list one ``name value`` pair per line, sorted by name;
    Json reports carry a schema version.

    Returns:
        str
    """
    data = report_data(counters, include_timers)
    if ReportFormat(format) == ReportFormat.JSON:
        return JSONRenderer().render(data).decode()

    lines = [f'{name} {value}' for name, value in data['counters'].items()]
    for name, seconds in data.get('timers', {}).items():
        lines.append(f'time_{name} {seconds:.6f}')
    return '\n'.join(lines) + '\n'


def parse_report(text):
    """
    Read a Json report back, from text or bytes.

    Returns:
        dict: validated report data
    """
    if isinstance(text, str):
        text = text.encode()
    try:
        payload = JSONParser().parse(io.BytesIO(text))
    except ParseError as e:
        raise PathwiseError(f'malformed telemetry report: {e}')
    serializer = TelemetryReportSerializer(data=payload)
    if not serializer.is_valid():
        raise PathwiseError(f'invalid telemetry report: {serializer.errors}')
    if serializer.validated_data['schema_version'] != REPORT_SCHEMA_VERSION:
        raise PathwiseError(f'unsupported report schema {serializer.validated_data["schema_version"]}')
    return serializer.validated_data

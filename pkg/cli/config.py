"""
Parameters file reading.

The file holds ``key = value`` lines; ``#`` starts a comment. Keys are the
SolverConfig fields. Values are read according to the field type, with
``true/false``, ``on/off``, ``yes/no`` and ``1/0`` accepted for switches
and ``none`` for an unset log file.
"""

import logging
import os
from dataclasses import fields
from pathlib import Path

from django.conf import settings

from pathwise.exceptions import ConfigError
from solver.models import SolverConfig

logger = logging.getLogger(__name__)

TRUE_WORDS = ('true', 'on', 'yes', '1')
FALSE_WORDS = ('false', 'off', 'no', '0')


def resolve_config_path(path=None):
    """--config flag, else the PATHWISE_SET variable, else pathwise.set."""
    if path:
        return Path(path)
    return Path(os.environ.get('PATHWISE_SET') or settings.PATHWISE_SET)


def _field_types():
    return {f.name: f.type for f in fields(SolverConfig)}


def convert_value(key, text, line=None):
    """Turn the text of a setting into the type of its field."""
    types = _field_types()
    if key not in types:
        raise ConfigError('unknown configuration key', key=key, line=line)
    kind = types[key]
    word = text.strip()
    if kind is bool:
        if word.lower() in TRUE_WORDS:
            return True
        if word.lower() in FALSE_WORDS:
            return False
        raise ConfigError(f'expected a switch, got {word!r}', key=key, line=line)
    if kind is str and key == 'log_file' and word.lower() in ('', 'none'):
        return None
    try:
        return kind(word)
    except ValueError:
        raise ConfigError(f'expected {kind.__name__}, got {word!r}', key=key, line=line)


def read_settings_file(path):
    """
    Parse a parameters file.

    Returns:
        dict: key -> (value, line number)
    """
    values = {}
    for number, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        text = raw.split('#', 1)[0].strip()
        if not text:
            continue
        if '=' not in text:
            raise ConfigError(f'expected "key = value", got {text!r}', line=number)
        key, value = (part.strip() for part in text.split('=', 1))
        if key in values:
            raise ConfigError(f'already set on line {values[key][1]}', key=key, line=number)
        values[key] = (convert_value(key, value, number), number)
    return values


def load_config(path=None, overrides=None, cyclicity=None):
    """
    Build the SolverConfig of a run.

    Args:
        path (str | None): parameters file, see resolve_config_path
        overrides (dict | None): command line values, already typed
        cyclicity (CyclicityClass | None): selects the default profile

    Returns:
        SolverConfig
    """
    config_path = resolve_config_path(path)
    from_file = {}
    if config_path.is_file():
        from_file = read_settings_file(config_path)
        logger.info('read %d settings from %s', len(from_file), config_path)
    elif path:
        logger.warning('parameters file %s not found, using defaults', config_path)

    flags = {key: value for key, value in (overrides or {}).items() if value is not None}
    values = {key: value for key, (value, _) in from_file.items()}
    values.update(flags)
    try:
        return SolverConfig.from_settings(cyclicity, **values)
    except ConfigError as e:
        if e.key in from_file and e.key not in flags:
            raise ConfigError(e.message, key=e.key, line=from_file[e.key][1])
        raise

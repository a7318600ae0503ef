"""
CLI Module
==========
Command-line front end: predict, fit, map, dpm, synth and orientations.

Components:
- units: unit-suffixed quantities and field specs
- output: atomic CSV/JSON/gnuplot writers
- formatters: stdout summaries
- help_texts: command and option help
- commands: click group and exit-code mapping
"""

from .units import InputParseError, parse_quantity, parse_direction, parse_field_spec, field_magnitude
from .output import OutputWriter, to_json
from .commands import cli, main, handle_errors, exit_code_for, CommandError, setup_logging

__version__ = '1.0.0'

__all__ = [
    'InputParseError',
    'parse_quantity',
    'parse_direction',
    'parse_field_spec',
    'field_magnitude',
    'OutputWriter',
    'to_json',
    'cli',
    'main',
    'handle_errors',
    'exit_code_for',
    'CommandError',
    'setup_logging',
]

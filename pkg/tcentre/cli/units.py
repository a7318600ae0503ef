"""
Unit-Suffixed Inputs
====================
Physical quantities on the command line always carry a unit suffix ('1T', '10ns', '0.5MHz').
The only bare number accepted is a zero field.

Field specs:
    <mag>[@dir]                       single field, e.g. 1T@001, 0
    <start>:<stop>:<steps>[@dir]      sweep, e.g. 0mT:2mT:9@110
where dir is a named crystal axis (001, 110, 111, ...) or an explicit 'x,y,z' vector.
"""
import logging
import re
from typing import List, Tuple

import numpy as np

from tcentre.spin_core import CRYSTAL_AXES, unit, InvalidFieldError

logger = logging.getLogger(__name__)


class InputParseError(ValueError):
    """Malformed unit or field specification"""
    pass


# ==================== UNIT TABLES ====================

FIELD_UNITS = {'T': 1.0, 'mT': 1e-3, 'uT': 1e-6, 'µT': 1e-6, 'G': 1e-4}
TIME_UNITS = {'s': 1.0, 'ms': 1e-3, 'us': 1e-6, 'µs': 1e-6, 'ns': 1e-9, 'ps': 1e-12}
FREQUENCY_UNITS = {'Hz': 1e-6, 'kHz': 1e-3, 'MHz': 1.0, 'GHz': 1e3}   # to MHz

UNIT_TABLES = {
    'field': FIELD_UNITS,       # → tesla
    'time': TIME_UNITS,         # → seconds
    'frequency': FREQUENCY_UNITS,  # → MHz
}

_QUANTITY = re.compile(r'^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-zµ]*)\s*$')


def parse_quantity(text: str, kind: str, name: str = "value", allow_bare_zero: bool = False) -> float:
    """
    Parse '<number><unit>' into SI (tesla, seconds) or MHz for frequencies

    Args:
        text: raw flag value
        kind: 'field', 'time' or 'frequency'
        name: flag name used in error messages
        allow_bare_zero: accept '0' without a unit

    Raises:
        InputParseError: bad number, missing or unknown unit
    """
    table = UNIT_TABLES[kind]
    match = _QUANTITY.match(str(text))
    if not match:
        raise InputParseError(f"{name}: cannot parse '{text}' as a {kind} with unit ({', '.join(table)})")

    value, suffix = float(match.group(1)), match.group(2)
    if not suffix:
        if allow_bare_zero and value == 0.0:
            return 0.0
        raise InputParseError(f"{name}: '{text}' needs a unit suffix ({', '.join(table)})")
    if suffix not in table:
        raise InputParseError(f"{name}: unknown {kind} unit '{suffix}' in '{text}' ({', '.join(table)})")
    return value * table[suffix]


def parse_direction(text: str, name: str = "field") -> np.ndarray:
    """Named crystal axis or explicit 'x,y,z', as a unit vector"""
    key = text.strip().strip('<>[]')
    if key in CRYSTAL_AXES:
        return unit(CRYSTAL_AXES[key])
    parts = [p for p in key.split(',') if p.strip()]
    if len(parts) != 3:
        raise InputParseError(
            f"{name}: direction '{text}' is neither a crystal axis ({', '.join(CRYSTAL_AXES)}) nor 'x,y,z'"
        )
    try:
        return unit([float(p) for p in parts])
    except ValueError:
        raise InputParseError(f"{name}: direction '{text}' is not numeric")
    except InvalidFieldError as e:
        raise InputParseError(f"{name}: {e}")


def _split_direction(spec: str) -> Tuple[str, str]:
    if '@' in spec:
        head, direction = spec.split('@', 1)
        return head.strip(), direction.strip()
    return spec.strip(), ''


def parse_field_spec(spec: str, name: str = "B") -> np.ndarray:
    """
    Field vectors described by a single or sweep spec

    Returns:
        (n, 3) array in tesla

    Raises:
        InputParseError: malformed spec, or non-zero field without a direction
    """
    head, direction_text = _split_direction(spec)
    if not head:
        raise InputParseError(f"{name}: empty field spec")

    if ':' in head:
        parts = head.split(':')
        if len(parts) != 3:
            raise InputParseError(f"{name}: sweep must be <start>:<stop>:<steps>, got '{head}'")
        start = parse_quantity(parts[0], 'field', name, allow_bare_zero=True)
        stop = parse_quantity(parts[1], 'field', name, allow_bare_zero=True)
        try:
            steps = int(parts[2])
        except ValueError:
            raise InputParseError(f"{name}: sweep steps must be an integer, got '{parts[2]}'")
        if steps < 1:
            raise InputParseError(f"{name}: sweep needs at least 1 step, got {steps}")
        magnitudes = np.linspace(start, stop, steps)
    else:
        magnitudes = np.array([parse_quantity(head, 'field', name, allow_bare_zero=True)])

    if np.all(magnitudes == 0.0) and not direction_text:
        return np.zeros((len(magnitudes), 3))
    if not direction_text:
        raise InputParseError(f"{name}: non-zero field '{spec}' needs a direction, e.g. '{head}@001'")

    direction = parse_direction(direction_text, name)
    return magnitudes[:, None] * direction[None, :]


def field_magnitude(spec: str, name: str = "B") -> float:
    """Single non-negative magnitude; a direction suffix is not allowed"""
    head, direction_text = _split_direction(spec)
    if direction_text or ':' in head:
        raise InputParseError(f"{name}: expected a magnitude only, got '{spec}'")
    value = parse_quantity(head, 'field', name)
    if value <= 0:
        raise InputParseError(f"{name}: magnitude must be > 0, got '{spec}'")
    return value


def parse_fields_list(specs: List[str], name: str = "B") -> np.ndarray:
    """Concatenate several field specs"""
    return np.vstack([parse_field_spec(s, name) for s in specs]) if specs else np.zeros((0, 3))

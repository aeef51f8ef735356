"""
Helpers for building validated configuration dataclasses.

Each configuration section is a frozen dataclass exposing ``clean()`` which
raises ConfigurationError naming the offending field. ``build_section``
turns a plain mapping (parsed JSON or key=value file) into such a
dataclass, rejecting unknown keys and prefixing errors with the section
name so messages read like ``field.length: must be > width``.
"""

import dataclasses
import json
import typing
from pathlib import Path

from .exceptions import ConfigurationError

_SCALARS = {float: float, int: int, str: str}


def _coerce(key, annotation, value):
    origin = typing.get_origin(annotation)
    if annotation is bool:
        if isinstance(value, str):
            lowered = value.strip().lower()
            if lowered in ('1', 'true', 'yes', 'on'):
                return True
            if lowered in ('0', 'false', 'no', 'off'):
                return False
            raise ConfigurationError(key, f"expected a boolean, got {value!r}")
        return bool(value)
    if annotation in _SCALARS:
        try:
            return _SCALARS[annotation](value)
        except (TypeError, ValueError):
            raise ConfigurationError(key, f"expected {annotation.__name__}, got {value!r}")
    if annotation is tuple or origin is tuple:
        if isinstance(value, str):
            value = json.loads(value)
        if not isinstance(value, (list, tuple)):
            raise ConfigurationError(key, f"expected a list, got {value!r}")
        args = typing.get_args(annotation)
        if args and args[-1] is Ellipsis:
            return tuple(_coerce(key, args[0], item) for item in value)
        return tuple(value)
    return value


def build_section(cls, data, prefix='', required=()):
    """
    Build and validate a configuration dataclass from a mapping.

    Args:
        cls: frozen dataclass type with a ``clean()`` method
        data: mapping of field name to raw value
        prefix: dotted section name used in error messages
        required: field names that must be present in ``data``

    Returns:
        Validated instance of ``cls``
    """
    data = dict(data or {})
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}

    for key in required:
        if key not in data:
            raise ConfigurationError(key, 'required key is missing').with_prefix(prefix)

    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigurationError(unknown[0], 'unknown key').with_prefix(prefix)

    kwargs = {}
    try:
        for name, value in data.items():
            kwargs[name] = _coerce(name, hints[name], value)
        instance = cls(**kwargs)
        instance.clean()
    except ConfigurationError as exc:
        raise exc.with_prefix(prefix)
    return instance


def section_to_dict(instance):
    """Plain, JSON-serializable dict of a configuration dataclass."""
    result = {}
    for f in dataclasses.fields(instance):
        value = getattr(instance, f.name)
        if isinstance(value, tuple):
            value = [list(v) if isinstance(v, tuple) else v for v in value]
        elif hasattr(value, 'value'):
            value = value.value
        result[f.name] = value
    return result


def parse_scalar(text):
    """Parse a key=value right-hand side: JSON literal if possible, else string."""
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def set_dotted(data, dotted_key, value):
    """Assign ``value`` into nested dict ``data`` at ``a.b.c``."""
    parts = dotted_key.split('.')
    node = data
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigurationError(dotted_key, f"'{part}' is not a section")
        node = child
    node[parts[-1]] = value


def read_config_file(path):
    """
    Read a JSON or key=value configuration file into a nested dict.

    key=value files hold one assignment per line; blank lines and lines
    starting with '#' are ignored; dotted keys create nested sections.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(str(path), f"cannot read configuration file ({exc.strerror})")

    if path.suffix == '.json' or text.lstrip().startswith('{'):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(str(path), f"invalid JSON at line {exc.lineno}")
        if not isinstance(data, dict):
            raise ConfigurationError(str(path), 'top level must be an object')
        return data

    data = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        if '=' not in line:
            raise ConfigurationError(f"{path}:{line_no}", 'expected key=value')
        key, value = line.split('=', 1)
        set_dotted(data, key.strip(), parse_scalar(value))
    return data

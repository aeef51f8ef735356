"""
Event trace CSV.

Layout::

    #schema=1
    time,event_kind,actor_id,x,y,theta,extra
    0.02,robot,0,-0.83,0.0,0.0,vx=0.5;vy=0.0

Floats are written with ``repr`` so a trace is byte-identical for identical
runs. ``extra`` holds ``key=value`` pairs separated by ``;``.
"""

import csv
from dataclasses import dataclass, field as dc_field
from enum import Enum
import logging
from pathlib import Path

from core.exceptions import TraceParseError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SCHEMA_HEADER = f"#schema={SCHEMA_VERSION}"
COLUMNS = ('time', 'event_kind', 'actor_id', 'x', 'y', 'theta', 'extra')


def format_value(value):
    if type(value) is float:
        return repr(value)
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    try:
        return repr(float(value))
    except (TypeError, ValueError):
        return str(value)


def format_extra(pairs):
    if isinstance(pairs, dict):
        pairs = pairs.items()
    return ';'.join(f"{key}={format_value(value)}" for key, value in pairs)


@dataclass
class TraceRow:
    line_no: int
    time: float
    kind: str
    actor_id: int = None
    x: float = None
    y: float = None
    theta: float = None
    extra: dict = dc_field(default_factory=dict)

    def number(self, key, default=None):
        """Float value of an extra key (TraceParseError when unparsable)."""
        if key not in self.extra or self.extra[key] == '':
            return default
        try:
            return float(self.extra[key])
        except ValueError:
            raise TraceParseError(self.line_no, f"extra '{key}' is not a number: {self.extra[key]!r}")

    def flag(self, key):
        return self.extra.get(key) == 'true'

    @property
    def position(self):
        return (self.x, self.y)


class TraceWriter:
    """Append-only writer for one run's trace file (or any text stream)."""

    def __init__(self, target):
        if isinstance(target, (str, Path)):
            Path(target).parent.mkdir(parents=True, exist_ok=True)
            self._stream = open(target, 'w', newline='')
            self._owns_stream = True
        else:
            self._stream = target
            self._owns_stream = False
        self.path = target if isinstance(target, (str, Path)) else None
        self._writer = csv.writer(self._stream, lineterminator='\n')
        self._stream.write(SCHEMA_HEADER + '\n')
        self._writer.writerow(COLUMNS)
        self.rows_written = 0

    def write(self, time, kind, actor_id=None, x=None, y=None, theta=None, extra=()):
        self._writer.writerow([
            format_value(float(time)), kind, format_value(actor_id),
            format_value(x), format_value(y), format_value(theta), format_extra(extra),
        ])
        self.rows_written += 1

    def write_event(self, event):
        self.write(event.time, event.kind, event.actor_id, event.x, event.y, event.theta, event.extra)

    def close(self):
        if self._owns_stream:
            self._stream.close()
        logger.debug(f"Trace closed after {self.rows_written} rows")

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()


def _parse_float(text, line_no, column):
    if text == '':
        return None
    try:
        return float(text)
    except ValueError:
        raise TraceParseError(line_no, f"column '{column}' is not a number: {text!r}")


def _parse_extra(text, line_no):
    extra = {}
    if not text:
        return extra
    for item in text.split(';'):
        if '=' not in item:
            raise TraceParseError(line_no, f"malformed extra item {item!r}")
        key, value = item.split('=', 1)
        extra[key] = value
    return extra


def parse_trace(text):
    """
    Parse trace text into TraceRow objects.

    Raises:
        TraceParseError: with the 1-based line number of the first bad line
    """
    lines = text.splitlines()
    if not lines or not lines[0].startswith('#schema='):
        raise TraceParseError(1, 'missing #schema header')
    version = lines[0].split('=', 1)[1].strip()
    if version != str(SCHEMA_VERSION):
        raise TraceParseError(1, f"unsupported schema version {version!r}")
    if len(lines) < 2 or tuple(lines[1].split(',')) != COLUMNS:
        raise TraceParseError(2, 'expected column header ' + ','.join(COLUMNS))

    rows = []
    reader = csv.reader(lines[2:])
    for offset, fields in enumerate(reader):
        line_no = offset + 3
        if not fields:
            continue
        if len(fields) != len(COLUMNS):
            raise TraceParseError(line_no, f"expected {len(COLUMNS)} columns, got {len(fields)}")
        time = _parse_float(fields[0], line_no, 'time')
        if time is None:
            raise TraceParseError(line_no, 'missing time')
        if not fields[1]:
            raise TraceParseError(line_no, 'missing event_kind')
        actor = None
        if fields[2]:
            try:
                actor = int(fields[2])
            except ValueError:
                raise TraceParseError(line_no, f"actor_id is not an integer: {fields[2]!r}")
        rows.append(TraceRow(
            line_no=line_no,
            time=time,
            kind=fields[1],
            actor_id=actor,
            x=_parse_float(fields[3], line_no, 'x'),
            y=_parse_float(fields[4], line_no, 'y'),
            theta=_parse_float(fields[5], line_no, 'theta'),
            extra=_parse_extra(fields[6], line_no),
        ))
    return rows


def read_trace(path):
    """Read and parse a trace file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise TraceParseError(0, f"cannot read {path} ({exc.strerror})")
    return parse_trace(text)

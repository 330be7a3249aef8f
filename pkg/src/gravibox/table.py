"""CSV tables with a ``#`` metadata preamble."""

import io
import math
from dataclasses import dataclass, field

from . import __version__


def format_value(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    if hasattr(value, "dtype"):
        return format_value(value.item())
    text = str(value)
    if "," in text or "\n" in text:
        raise ValueError(f"field {text!r} would break the CSV layout")
    return text


@dataclass
class CsvTable:
    """Rectangular numeric table plus ``key=value`` metadata.

    Serialized as ``# gravibox v<version>``, one ``# key=value`` line per
    metadata entry (in insertion order), the header row and the data rows.
    """

    header: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.header):
            raise ValueError(f"row has {len(values)} fields, header has {len(self.header)}")
        self.rows.append(tuple(values))

    def column(self, name):
        i = self.header.index(name)
        return [row[i] for row in self.rows]

    def to_text(self):
        out = io.StringIO()
        out.write(f"# gravibox v{__version__}\n")
        for key, value in self.meta.items():
            out.write(f"# {key}={format_value(value) if not isinstance(value, str) else value}\n")
        out.write(",".join(self.header) + "\n")
        for row in self.rows:
            out.write(",".join(format_value(v) for v in row) + "\n")
        return out.getvalue()


def parse_csv(text):
    """Inverse of :meth:`CsvTable.to_text`; data fields come back as strings."""
    meta = {}
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# gravibox v"):
        raise ValueError("missing gravibox version line")
    i = 1
    while i < len(lines) and lines[i].startswith("#"):
        key, _, value = lines[i][1:].strip().partition("=")
        meta[key] = value
        i += 1
    header = lines[i].split(",")
    rows = [tuple(line.split(",")) for line in lines[i + 1:] if line]
    return CsvTable(header=header, rows=rows, meta=meta)

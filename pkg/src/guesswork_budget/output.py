"""
Result emission: CSV tables, JSON reports and source-file parsing.

Numbers are written with 12 significant digits and '\\n' line endings so
repeated runs produce identical bytes. The bits display divides a column
with unit power p by (log 2)^p and says so in the header.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import click

from .errors import OutputError, SourceError

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 12


@dataclass(frozen=True)
class Column:
    """A table column; unit_power is 0 for dimensionless values, p for nats^p."""

    name: str
    unit_power: int = 0

    def header(self, units: str = "nats") -> str:
        if self.unit_power == 0:
            return self.name
        suffix = units if self.unit_power == 1 else f"{units}{self.unit_power}"
        return f"{self.name}_{suffix}"


@dataclass
class Table:
    columns: Sequence[Column]
    rows: list[Sequence[Any]] = field(default_factory=list)

    def add(self, *values: Any) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"Expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(values)


def format_value(value: Any) -> str:
    """Deterministic text for one cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, f".{SIGNIFICANT_DIGITS}g")
    return str(value)


def convert_units(value: Any, unit_power: int, units: str) -> Any:
    if units == "bits" and unit_power and isinstance(value, float):
        return value / math.log(2.0) ** unit_power
    return value


def render_csv(table: Table, units: str = "nats") -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([column.header(units) for column in table.columns])
    for row in table.rows:
        writer.writerow(
            [
                format_value(convert_units(value, column.unit_power, units))
                for column, value in zip(table.columns, row)
            ]
        )
    return buffer.getvalue()


def render_json(records: Iterable[dict]) -> str:
    return json.dumps(list(records), indent=2) + "\n"


def atomic_write_text(path: Path, text: str) -> None:
    """
    Write text to path through a temporary sibling and os.replace.

    Raises:
        OutputError: The file cannot be written; no partial file is left behind.
    """
    path = Path(path)
    tmp_name = None
    try:
        with tempfile.NamedTemporaryFile(
            "w",
            encoding="utf-8",
            newline="",
            dir=path.parent,
            prefix=f".{path.name}.",
            suffix=".tmp",
            delete=False,
        ) as handle:
            tmp_name = handle.name
            handle.write(text)
        os.replace(tmp_name, path)
    except OSError as e:
        if tmp_name is not None and os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise OutputError(f"Failed to write {path}", str(e)) from e
    logger.info("Wrote %s", path)


def emit(text: str, output: Optional[Path] = None) -> None:
    """Send data to the output file, or to stdout when no file is given."""
    if output is not None:
        atomic_write_text(output, text)
    else:
        click.echo(text, nl=False)


def parse_floats(text: str, what: str = "value") -> list[float]:
    """Parse a comma- or whitespace-separated list of numbers."""
    tokens = text.replace(",", " ").split()
    try:
        return [float(token) for token in tokens]
    except ValueError as e:
        raise SourceError(f"Cannot parse {what} list: {text!r}", str(e)) from e


def read_source_file(path: Path) -> list[float]:
    """
    Read probabilities from a one-line text file of whitespace-separated numbers.

    Raises:
        OutputError: The file cannot be read.
        SourceError: The file holds more than one line of numbers or bad tokens.
    """
    try:
        content = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise OutputError(f"Failed to read source file {path}", str(e)) from e
    lines = [line for line in content.splitlines() if line.strip()]
    if len(lines) != 1:
        raise SourceError(
            f"Source file {path} must hold exactly one line of probabilities",
            f"Found {len(lines)} non-empty lines",
        )
    return parse_floats(lines[0], "probability")

"""Runtime configuration: resource guards, thread count and per-run options."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, TypeVar

from .errors import ConfigError

logger = logging.getLogger(__name__)

ENV_THREADS = "GUESSWORK_THREADS"

# Desk-scale defaults; the CLI can lift them with --force-guard
DEFAULT_MAX_CLASSES = 10**7
DEFAULT_MAX_ENUMERATED = 2**26
DEFAULT_MAX_ORACLE_STRINGS = 2**20
DEFAULT_MAX_SCAN_POINTS = 10**7

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class Guards:
    """Resource caps applied before any expensive enumeration."""

    max_classes: int = DEFAULT_MAX_CLASSES
    max_enumerated: int = DEFAULT_MAX_ENUMERATED
    max_oracle_strings: int = DEFAULT_MAX_ORACLE_STRINGS
    max_scan_points: int = DEFAULT_MAX_SCAN_POINTS

    @classmethod
    def unbounded(cls) -> "Guards":
        """Guards that never trip (used by --force-guard)."""
        huge = 2**62
        return cls(
            max_classes=huge,
            max_enumerated=huge,
            max_oracle_strings=huge,
            max_scan_points=huge,
        )


DEFAULT_GUARDS = Guards()


def thread_count(value: Optional[str | int] = None) -> int:
    """
    Resolve the worker count for internal parallelism.

    Args:
        value: Explicit value; when None the GUESSWORK_THREADS environment
            variable is consulted, then the CPU count.

    Returns:
        A positive integer.

    Raises:
        ConfigError: If the value is not a positive integer.
    """
    raw = value if value is not None else os.environ.get(ENV_THREADS)
    if raw is None or raw == "":
        return max(1, os.cpu_count() or 1)
    try:
        count = int(raw)
    except (TypeError, ValueError):
        raise ConfigError(
            f"Invalid thread count: {raw!r}",
            f"Set {ENV_THREADS} to a positive integer",
        )
    if count < 1:
        raise ConfigError(
            f"Thread count must be positive, got {count}",
            f"Set {ENV_THREADS} to a positive integer",
        )
    return count


def ordered_map(
    fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None
) -> list[R]:
    """Apply fn to every item on a thread pool, returning results in input order."""
    items = list(items)
    workers = thread_count(threads)
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class RunConfig:
    """Global options resolved by the CLI and shared with every command."""

    command: Optional[str] = None
    units: str = "nats"
    threads: Optional[int] = None
    verbose: bool = False
    force_guard: bool = False
    output: Optional[Path] = None
    fmt: str = "csv"
    guards: Guards = field(default_factory=Guards)

    def __post_init__(self) -> None:
        if self.units not in ("nats", "bits"):
            raise ConfigError(f"Unknown display units: {self.units}", "Use 'nats' or 'bits'")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"Unknown output format: {self.fmt}", "Use 'csv' or 'json'")
        if self.threads is not None:
            self.threads = thread_count(self.threads)
        if self.force_guard:
            logger.warning("Resource guards disabled by --force-guard")
            self.guards = Guards.unbounded()

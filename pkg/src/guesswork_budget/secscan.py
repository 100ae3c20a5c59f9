"""
Where in the simplex the skewentropy condition holds.

Lattice scans of the ternary simplex, random exploration of larger
alphabets, the near-uniform certificate, and the construction that breaks
the condition for every alphabet with at least three symbols.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .config import DEFAULT_GUARDS, Guards, ordered_map
from .errors import OutOfRangeError, SecInconsistencyError, TooLargeError, WitnessNotFoundError
from .guesswork import compositions
from .source_stats import (
    MIN_PROB,
    CategoricalSource,
    SecReport,
    construction_source,
    information_moments,
    make_source,
    sec_report,
)

logger = logging.getLogger(__name__)

MIN_RESOLUTION = 10
MIN_GRID_MARGIN = 1e-4
SCAN_CHUNK = 2**16
DEVIATION_BOUND = 2.0
WITNESS_EPS = tuple(10.0**-e for e in range(2, 10))
BINARY_SCAN_PHIS = tuple(i / 1000 for i in range(1, 500))


class SecLabel(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class GridPoint:
    """A scanned probability vector and its SEC statistics."""

    coords: tuple[float, ...]
    report: SecReport

    @property
    def theta(self) -> CategoricalSource:
        return CategoricalSource(np.array(self.coords))

    @property
    def label(self) -> SecLabel:
        return SecLabel(self.report.status)


@dataclass(frozen=True)
class SimplexGrid:
    """Interior lattice points at step 1/resolution, in lexicographic order."""

    resolution: int
    dimension: int
    points: tuple[GridPoint, ...]

    def counts(self) -> dict[SecLabel, int]:
        tally = Counter(point.label for point in self.points)
        return {label: tally.get(label, 0) for label in SecLabel}

    def failures(self) -> list[GridPoint]:
        return [p for p in self.points if p.label is SecLabel.FAIL]


@dataclass(frozen=True)
class NearUniformCertificate:
    """
    Sufficient condition for the SEC.

    certified means every information value log(1/theta_i) is within 2 nats of
    H(theta). in_box is the stronger check e^-1/|X| < theta_i < e/|X|.
    """

    max_info_deviation: float
    certified: bool
    in_box: bool
    report: SecReport


@dataclass(frozen=True)
class SecWitness:
    theta: CategoricalSource
    eps: float
    report: SecReport


def _points_from_probs(probs: np.ndarray) -> list[GridPoint]:
    shannon, var, skew, margin = information_moments(probs)
    return [
        GridPoint(
            coords=tuple(float(x) for x in row),
            report=SecReport(
                shannon=float(h),
                varentropy=float(v),
                skewentropy=float(s),
                margin=float(m),
                satisfies_sec=bool(m > 0),
            ),
        )
        for row, h, v, s, m in zip(probs, shannon, var, skew, margin)
    ]


def interior_point_count(resolution: int, dimension: int = 3) -> int:
    """Lattice points i/m with every i >= 1: C(m - 1, dimension - 1)."""
    return math.comb(resolution - 1, dimension - 1)


def scan_simplex(
    resolution: int,
    dimension: int = 3,
    guards: Guards = DEFAULT_GUARDS,
    threads: Optional[int] = None,
) -> SimplexGrid:
    """
    Evaluate the SEC at every interior lattice point of the simplex.

    Args:
        resolution: Grid step 1/resolution along each barycentric axis, at least 10.
        dimension: Alphabet size; only 3 is scanned on a lattice.
        guards: max_scan_points bounds the point count.
        threads: Worker count for chunked evaluation.

    Raises:
        OutOfRangeError: resolution < 10, dimension other than 3, or a
            step finer than the 1e-4 grid margin.
        TooLargeError: More points than guards.max_scan_points.
    """
    if resolution < MIN_RESOLUTION:
        raise OutOfRangeError(f"Resolution must be at least {MIN_RESOLUTION}, got {resolution}")
    if dimension != 3:
        raise OutOfRangeError(
            f"Lattice scans cover the ternary simplex only, got dimension {dimension}",
            "Use sample_simplex for larger alphabets",
        )
    if 1.0 / resolution < MIN_GRID_MARGIN:
        raise OutOfRangeError(
            f"Step 1/{resolution} is finer than the grid margin {MIN_GRID_MARGIN:g}",
        )
    total = interior_point_count(resolution, dimension)
    if total > guards.max_scan_points:
        raise TooLargeError(
            f"{total} grid points exceed the scan cap {guards.max_scan_points}",
            "Lower --resolution or pass --force-guard",
        )

    lattice = (compositions(resolution - dimension, dimension) + 1) / resolution
    chunks = [lattice[i : i + SCAN_CHUNK] for i in range(0, len(lattice), SCAN_CHUNK)]
    points = [p for chunk in ordered_map(_points_from_probs, chunks, threads) for p in chunk]
    logger.info("Scanned %d points at resolution %d", len(points), resolution)
    return SimplexGrid(resolution=resolution, dimension=dimension, points=tuple(points))


def binary_sec_scan(phis: Iterable[float] = BINARY_SCAN_PHIS) -> list[GridPoint]:
    """SEC statistics along the binary segment (phi, 1 - phi)."""
    values = np.asarray(list(phis), dtype=float)
    if np.any((values <= 0) | (values >= 1)):
        raise OutOfRangeError("Binary parameters must lie in (0, 1)")
    return _points_from_probs(np.column_stack([values, 1.0 - values]))


def sample_simplex(
    dimension: int, samples: int, seed: int = 0, concentration: float = 1.0
) -> list[CategoricalSource]:
    """
    Seeded Dirichlet draws on the simplex of the given dimension.

    Draws with an entry below MIN_PROB are dropped, so fewer than samples
    sources may come back.
    """
    if dimension < 2:
        raise OutOfRangeError(f"Dimension must be at least 2, got {dimension}")
    rng = np.random.default_rng(seed)
    draws = rng.dirichlet(np.full(dimension, concentration), size=samples)
    kept = draws[draws.min(axis=1) >= MIN_PROB]
    if len(kept) < samples:
        logger.debug("Dropped %d draws below %g", samples - len(kept), MIN_PROB)
    return [make_source(row) for row in kept]


def sample_near_uniform(
    dimension: int, samples: int, seed: int = 0, spread: float = 1.0
) -> list[CategoricalSource]:
    """
    Seeded sources with log-weights uniform on (-spread/2, spread/2).

    spread = 1 keeps every draw inside the box e^-1/|X| < theta_i < e/|X|.
    """
    if dimension < 2:
        raise OutOfRangeError(f"Dimension must be at least 2, got {dimension}")
    rng = np.random.default_rng(seed)
    weights = np.exp(rng.uniform(-spread / 2, spread / 2, size=(samples, dimension)))
    return [make_source(row) for row in weights]


def near_uniform_certificate(theta: CategoricalSource) -> NearUniformCertificate:
    """
    Check max_i |log(1/theta_i) - H(theta)| < 2 and the box e^-1/|X| < theta_i < e/|X|.

    Raises:
        SecInconsistencyError: A certified non-uniform source fails the SEC.
    """
    report = sec_report(theta)
    deviation = float(np.max(np.abs(-theta.log_probs - report.shannon)))
    k = theta.alphabet_size
    in_box = bool(np.all((theta.probs > math.exp(-1) / k) & (theta.probs < math.e / k)))
    certificate = NearUniformCertificate(
        max_info_deviation=deviation,
        certified=deviation < DEVIATION_BOUND,
        in_box=in_box,
        report=report,
    )
    if certificate.certified and not theta.is_uniform and not report.satisfies_sec:
        raise SecInconsistencyError(
            f"Certified source {theta!r} has SEC margin {report.margin:.3g}",
            "The deviation bound guarantees a positive margin; this is a numeric problem",
        )
    return certificate


def certify_batch(
    sources: Sequence[CategoricalSource], threads: Optional[int] = None
) -> list[NearUniformCertificate]:
    return ordered_map(near_uniform_certificate, sources, threads)


def sec_failure_witness(alphabet_size: int, eps_grid: Iterable[float] = WITNESS_EPS) -> SecWitness:
    """
    First eps on the grid whose construction source fails the SEC.

    The source has alphabet_size - 1 entries (1 - eps)/(|X| - 1) and one entry eps.

    Raises:
        OutOfRangeError: alphabet_size < 3 (binary sources always satisfy the SEC).
        WitnessNotFoundError: No grid value gives a nonpositive margin.
    """
    if alphabet_size < 3:
        raise OutOfRangeError(
            f"No SEC-failing source exists on {alphabet_size} symbols",
            "Every non-uniform binary source satisfies the SEC",
        )
    for eps in eps_grid:
        if not eps < 1.0 / alphabet_size:
            continue
        theta = construction_source(alphabet_size, eps)
        report = sec_report(theta)
        if report.margin <= 0:
            logger.debug("|X|=%d witness at eps=%g (margin %.3g)", alphabet_size, eps, report.margin)
            return SecWitness(theta=theta, eps=eps, report=report)
    raise WitnessNotFoundError(
        f"No eps on the grid breaks the SEC for |X|={alphabet_size}",
        "Extend the grid toward smaller eps",
    )

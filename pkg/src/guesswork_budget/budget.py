"""
Entropy-budget and guesswork-budget comparisons.

Two sources are compared at equal total entropy: the lower-entropy source
theta2 gets the longer string n2 = n1 / eta, eta = H(theta2) / H(theta1). At
equal total guesswork the per-character budget scales the other way,
g2 = eta * g1. Each comparison reports both exponents and which side is
larger.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Optional, Sequence

from scipy.optimize import bisect

from .config import ordered_map
from .errors import (
    EntropyOrderError,
    EqualEntropyError,
    InfeasibleBudgetError,
    OutOfEntropyRangeError,
    OutOfRangeError,
    OutOfRegimeError,
    UniformBaseError,
)
from .source_stats import (
    CategoricalSource,
    binary_entropy,
    binary_source,
    renyi_entropy,
    sec_report,
    shannon_entropy,
    uniform_source,
)
from .tilt import entropy_floor, rate_function, tilt

logger = logging.getLogger(__name__)

EQUAL_ENTROPY_TOLERANCE = 1e-12
BINARY_ENTROPY_TOLERANCE = 1e-12
LENGTH_SNAP_TOLERANCE = 1e-9

SWEEP_ALPHAS = (1.1, 1.5, 2.0, 4.0)
SWEEP_RHOS = (0.1, 0.5, 1.0, 2.0, 5.0)
SWEEP_FRACTIONS = (0.2, 0.5, 0.8)

# "only if" searches: alpha in (1, 3], rho in (0, 2]
VIOLATION_ALPHAS = (1.1, 1.25, 1.5, 2.0, 2.5, 3.0)
VIOLATION_RHOS = (0.1, 0.25, 0.5, 1.0, 1.5, 2.0)
# g1 sits a fraction of the way from the attainable floor up to H(theta1)
RATE_VIOLATION_ALPHAS = (1.001, 1.01, 1.05, 1.1, 1.5, 2.0, 3.0)
RATE_VIOLATION_FRACTIONS = (0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999)

TABLE1_TOTAL_BITS = 9.0
TABLE1_LENGTHS = (9, 10, 12, 15, 18, 22)


class Ordering(str, Enum):
    """Outcome of lhs versus rhs."""

    LESS = "<"
    EQUAL = "="
    GREATER = ">"

    @classmethod
    def of(cls, lhs: float, rhs: float) -> "Ordering":
        if lhs < rhs:
            return cls.LESS
        if lhs > rhs:
            return cls.GREATER
        return cls.EQUAL


@dataclass(frozen=True)
class BudgetComparison:
    """
    Both exponents of a budgeted comparison.

    theta1 is the higher-entropy source; n2_real = n1 / eta stays real-valued,
    n2_rounded is its ceiling. expected is the ordering the comparison's
    theorem guarantees, or None when nothing is guaranteed.
    """

    kind: str
    theta1: CategoricalSource
    theta2: CategoricalSource
    eta: float
    n1: int
    lhs: float
    rhs: float
    expected: Optional[Ordering] = None
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def n2_real(self) -> float:
        return self.n1 / self.eta

    @property
    def n2_rounded(self) -> int:
        nearest = round(self.n2_real)
        if abs(self.n2_real - nearest) <= LENGTH_SNAP_TOLERANCE * max(1.0, nearest):
            return int(nearest)
        return math.ceil(self.n2_real)

    @property
    def verdict(self) -> Ordering:
        return Ordering.of(self.lhs, self.rhs)

    @property
    def holds(self) -> Optional[bool]:
        if self.expected is None:
            return None
        return self.verdict is self.expected

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs


def _order_pair(
    theta1: CategoricalSource, theta2: CategoricalSource, auto_order: bool = True
) -> tuple[CategoricalSource, CategoricalSource, float]:
    h1, h2 = shannon_entropy(theta1), shannon_entropy(theta2)
    if abs(h1 - h2) <= EQUAL_ENTROPY_TOLERANCE:
        raise EqualEntropyError(
            f"Both sources have entropy {h1:.12g} nats",
            "The entropy ratio is 1 and every budgeted comparison degenerates",
        )
    if h2 > h1:
        if not auto_order:
            raise EntropyOrderError(
                f"H(theta2) = {h2:.12g} exceeds H(theta1) = {h1:.12g}",
                "Pass the higher-entropy source first or enable auto-ordering",
            )
        theta1, theta2, h1, h2 = theta2, theta1, h2, h1
    return theta1, theta2, h2 / h1


def entropy_ratio(
    theta1: CategoricalSource, theta2: CategoricalSource, auto_order: bool = True
) -> float:
    """
    eta = H(theta2) / H(theta1) in (0, 1).

    Raises:
        EqualEntropyError: The entropies agree within 1e-12.
        EntropyOrderError: H(theta2) > H(theta1) and auto_order is False.
    """
    return _order_pair(theta1, theta2, auto_order)[2]


def _require_low_tilt(theta1: CategoricalSource, alpha: float) -> CategoricalSource:
    if theta1.is_uniform:
        raise UniformBaseError("Tilting the uniform source gives the uniform source back")
    if not alpha > 1.0:
        raise OutOfRangeError(
            f"Tilt order must exceed 1 for a low-entropy member, got {alpha}",
        )
    return tilt(theta1, alpha).dist


def _sec_expectation(theta1: CategoricalSource, ordering: Ordering) -> Optional[Ordering]:
    return ordering if sec_report(theta1).satisfies_sec else None


def compare_moment_exponents(
    theta1: CategoricalSource, alpha: float, rho: float, n1: int = 1
) -> BudgetComparison:
    """
    H_{1/(1+rho)}(theta1) against (1/eta) H_{1/(1+rho)}(theta2), theta2 = tau(theta1, alpha).

    The left side is smaller for every low-entropy member exactly when
    theta1 satisfies the SEC, so expected is LESS for SEC sources and None
    otherwise.
    """
    if not rho > 0:
        raise OutOfRangeError(f"Moment order must be positive, got {rho}")
    theta2 = _require_low_tilt(theta1, alpha)
    eta = entropy_ratio(theta1, theta2, auto_order=False)
    order = 1.0 / (1.0 + rho)
    return BudgetComparison(
        kind="moment",
        theta1=theta1,
        theta2=theta2,
        eta=eta,
        n1=n1,
        lhs=renyi_entropy(theta1, order),
        rhs=renyi_entropy(theta2, order) / eta,
        expected=_sec_expectation(theta1, Ordering.LESS),
        params={"alpha": alpha, "rho": rho},
    )


def compare_vs_uniform_moments(
    theta: CategoricalSource, rho: float, n1: int = 1
) -> BudgetComparison:
    """log |X| against (1/eta) H_{1/(1+rho)}(theta) with eta = H(theta) / log |X|."""
    if theta.is_uniform:
        raise UniformBaseError("Comparison against the uniform source needs a non-uniform input")
    if not rho > 0:
        raise OutOfRangeError(f"Moment order must be positive, got {rho}")
    uniform = uniform_source(theta.alphabet_size)
    top = math.log(theta.alphabet_size)
    eta = shannon_entropy(theta) / top
    return BudgetComparison(
        kind="moment_vs_uniform",
        theta1=uniform,
        theta2=theta,
        eta=eta,
        n1=n1,
        lhs=top,
        rhs=renyi_entropy(theta, 1.0 / (1.0 + rho)) / eta,
        expected=Ordering.LESS,
        params={"rho": rho},
    )


def compare_rate_functions(
    theta1: CategoricalSource, alpha: float, g1: float, n1: int = 1
) -> BudgetComparison:
    """
    Lambda*_theta1(g1) against (1/eta) Lambda*_theta2(eta * g1), theta2 = tau(theta1, alpha).

    Raises:
        OutOfRegimeError: g1 >= H(theta1).
        OutOfRangeError: g1 <= 0 or alpha <= 1.
        OutOfEntropyRangeError: eta * g1 is below what theta2's family attains.
    """
    h1 = shannon_entropy(theta1)
    if g1 >= h1:
        raise OutOfRegimeError(
            f"Budget g1 = {g1:.12g} is not below H(theta1) = {h1:.12g}",
            "Both rate functions vanish at and above the entropy",
        )
    if not g1 > 0:
        raise OutOfRangeError(f"Guesswork budget must be positive, got {g1}")
    theta2 = _require_low_tilt(theta1, alpha)
    eta = entropy_ratio(theta1, theta2, auto_order=False)
    g2 = eta * g1
    return BudgetComparison(
        kind="rate",
        theta1=theta1,
        theta2=theta2,
        eta=eta,
        n1=n1,
        lhs=rate_function(theta1, g1),
        rhs=rate_function(theta2, g2) / eta,
        expected=_sec_expectation(theta1, Ordering.GREATER),
        params={"alpha": alpha, "g1": g1, "g2": g2},
    )


def compare_vs_uniform_rate(theta: CategoricalSource, g: float, n1: int = 1) -> BudgetComparison:
    """log |X| - g against (1/eta) Lambda*_theta(eta * g)."""
    if theta.is_uniform:
        raise UniformBaseError("Comparison against the uniform source needs a non-uniform input")
    top = math.log(theta.alphabet_size)
    if not 0.0 < g < top:
        raise OutOfRangeError(f"Guesswork budget must lie in (0, {top:.12g}), got {g}")
    eta = shannon_entropy(theta) / top
    return BudgetComparison(
        kind="rate_vs_uniform",
        theta1=uniform_source(theta.alphabet_size),
        theta2=theta,
        eta=eta,
        n1=n1,
        lhs=top - g,
        rhs=rate_function(theta, eta * g) / eta,
        expected=Ordering.GREATER,
        params={"g1": g, "g2": eta * g},
    )


def compare_sources(
    theta1: CategoricalSource,
    theta2: CategoricalSource,
    rho: Optional[float] = None,
    g1: Optional[float] = None,
    n1: int = 1,
) -> BudgetComparison:
    """
    Free-form comparison of two sources, reordered so theta1 has the higher entropy.

    Exactly one of rho (moment exponents) or g1 (rate functions) must be
    given. No theorem covers an arbitrary pair, so expected is None.
    """
    if (rho is None) == (g1 is None):
        raise OutOfRangeError("Give exactly one of rho or g1")
    theta1, theta2, eta = _order_pair(theta1, theta2)
    if rho is not None:
        if not rho > 0:
            raise OutOfRangeError(f"Moment order must be positive, got {rho}")
        order = 1.0 / (1.0 + rho)
        return BudgetComparison(
            kind="moment_free",
            theta1=theta1,
            theta2=theta2,
            eta=eta,
            n1=n1,
            lhs=renyi_entropy(theta1, order),
            rhs=renyi_entropy(theta2, order) / eta,
            params={"rho": rho},
        )
    assert g1 is not None
    if not g1 > 0:
        raise OutOfRangeError(f"Guesswork budget must be positive, got {g1}")
    return BudgetComparison(
        kind="rate_free",
        theta1=theta1,
        theta2=theta2,
        eta=eta,
        n1=n1,
        lhs=rate_function(theta1, g1),
        rhs=rate_function(theta2, eta * g1) / eta,
        params={"g1": g1, "g2": eta * g1},
    )


def match_binary_entropy(entropy: float) -> float:
    """
    Smaller parameter phi in (0, 0.5] of the binary source with entropy h(phi) = entropy.

    Raises:
        InfeasibleBudgetError: entropy exceeds log 2.
        OutOfRangeError: entropy is not positive.
    """
    top = math.log(2.0)
    if entropy > top + BINARY_ENTROPY_TOLERANCE:
        raise InfeasibleBudgetError(
            f"Per-character entropy {entropy:.12g} exceeds log 2 = {top:.12g}",
            "Use longer strings or a smaller total budget",
        )
    if not entropy > 0:
        raise OutOfRangeError(f"Per-character entropy must be positive, got {entropy}")
    if abs(entropy - top) <= BINARY_ENTROPY_TOLERANCE:
        return 0.5
    phi = bisect(lambda p: binary_entropy(p) - entropy, 0.0, 0.5, xtol=1e-16, maxiter=200)
    return float(phi)


def match_sources_to_budget(
    total_entropy_nats: float, lengths: Iterable[int]
) -> list[CategoricalSource]:
    """Binary sources with n * H(theta) = total_entropy_nats, one per length."""
    sources = []
    for n in lengths:
        if n < 1:
            raise OutOfRangeError(f"Lengths must be positive, got {n}")
        phi = match_binary_entropy(total_entropy_nats / n)
        sources.append(binary_source(phi))
        logger.debug("n=%d matched phi=%.12g", n, phi)
    return sources


def moment_sweep(
    sources: Sequence[CategoricalSource],
    alphas: Iterable[float] = SWEEP_ALPHAS,
    rhos: Iterable[float] = SWEEP_RHOS,
    threads: Optional[int] = None,
) -> list[BudgetComparison]:
    """compare_moment_exponents over sources x alphas x rhos, in that nesting order."""
    grid = [(src, a, r) for src in sources for a in alphas for r in rhos]
    return ordered_map(lambda item: compare_moment_exponents(*item), grid, threads)


def rate_sweep(
    sources: Sequence[CategoricalSource],
    alphas: Iterable[float] = SWEEP_ALPHAS,
    fractions: Iterable[float] = SWEEP_FRACTIONS,
    threads: Optional[int] = None,
) -> list[BudgetComparison]:
    """compare_rate_functions with g1 = fraction * H(theta1)."""
    grid = [
        (src, a, f * shannon_entropy(src)) for src in sources for a in alphas for f in fractions
    ]
    return ordered_map(lambda item: compare_rate_functions(*item), grid, threads)


def uniform_moment_sweep(
    sources: Sequence[CategoricalSource],
    rhos: Iterable[float] = SWEEP_RHOS,
    threads: Optional[int] = None,
) -> list[BudgetComparison]:
    grid = [(src, r) for src in sources for r in rhos]
    return ordered_map(lambda item: compare_vs_uniform_moments(*item), grid, threads)


def uniform_rate_sweep(
    sources: Sequence[CategoricalSource],
    fractions: Iterable[float] = SWEEP_FRACTIONS,
    threads: Optional[int] = None,
) -> list[BudgetComparison]:
    """compare_vs_uniform_rate with g = fraction * log |X|."""
    grid = [(src, f * math.log(src.alphabet_size)) for src in sources for f in fractions]
    return ordered_map(lambda item: compare_vs_uniform_rate(*item), grid, threads)


def moment_violations(
    theta1: CategoricalSource,
    alphas: Iterable[float] = VIOLATION_ALPHAS,
    rhos: Iterable[float] = VIOLATION_RHOS,
) -> list[BudgetComparison]:
    """Grid points where H_{1/(1+rho)}(theta1) < (1/eta) H_{1/(1+rho)}(theta2) fails."""
    return [c for c in moment_sweep([theta1], alphas, rhos) if c.verdict is not Ordering.LESS]


def rate_violations(
    theta1: CategoricalSource,
    alphas: Iterable[float] = RATE_VIOLATION_ALPHAS,
    fractions: Iterable[float] = RATE_VIOLATION_FRACTIONS,
) -> list[BudgetComparison]:
    """
    Grid points where Lambda*_theta1(g1) > (1/eta) Lambda*_theta2(eta * g1) fails.

    For each alpha, g1 runs over fractions of the window (L, H(theta1)) with
    L = max(floor(theta1), floor(theta2) / eta), so both rate functions are
    defined. Tied maxima make this window narrow.
    """
    h1 = shannon_entropy(theta1)
    found = []
    for alpha in alphas:
        theta2 = _require_low_tilt(theta1, alpha)
        eta = entropy_ratio(theta1, theta2, auto_order=False)
        lower = max(entropy_floor(theta1), entropy_floor(theta2) / eta)
        if lower >= h1:
            logger.debug("alpha=%g: empty budget window", alpha)
            continue
        for fraction in fractions:
            g1 = lower + fraction * (h1 - lower)
            try:
                comparison = compare_rate_functions(theta1, alpha, g1)
            except OutOfEntropyRangeError as exc:
                logger.debug("alpha=%g g1=%.12g skipped: %s", alpha, g1, exc.message)
                continue
            if comparison.verdict is not Ordering.GREATER:
                found.append(comparison)
    return found

"""
Exact finite-length guesswork for i.i.d. sources.

Strings of length n are grouped into type classes: every string with the same
symbol counts has the same probability, so the optimal guessing order visits
whole classes in decreasing probability and only the order inside a class is
arbitrary. Moments and success probabilities are sums over classes, which
keeps binary n=2000 at 2001 terms instead of 2^2000.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from .config import DEFAULT_GUARDS, Guards
from .errors import ModeUnavailableError, OutOfRangeError, TooLargeError, TooManyClassesError
from .source_stats import CategoricalSource, renyi_entropy, shannon_entropy
from .tilt import entropy_floor, rate_function

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12
# e^36 < 2^53, so below this log-budget the query count is an exact float
EXACT_BUDGET_LIMIT = 36.0
BUDGET_SNAP_TOLERANCE = 1e-9
ENUMERATION_CHUNK = 2**20
SMALL_CLASS_LOG_RATIO = math.log(1e-6)


class MomentMode(str, Enum):
    """How sums of rank powers inside a class are evaluated."""

    EXACT_ENUMERATED = "exact_enumerated"
    EXACT_INTEGER = "exact_integer"
    INTEGRAL_APPROX = "integral_approx"


@dataclass(frozen=True)
class TypeClass:
    """All strings sharing one probability."""

    log_prob: float
    count: int
    log_count: float


@dataclass(frozen=True)
class GuessProfile:
    """Type classes of an i.i.d. source at length n, most probable first."""

    base: CategoricalSource
    length: int
    classes: tuple[TypeClass, ...]

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        """Number of strictly more probable strings before each class."""
        running, result = 0, []
        for cls in self.classes:
            result.append(running)
            running += cls.count
        return tuple(result)

    @property
    def total_strings(self) -> int:
        return self.base.alphabet_size**self.length

    @property
    def log_total_strings(self) -> float:
        return self.length * math.log(self.base.alphabet_size)

    def log_mass(self) -> float:
        """log of the total probability; 0 up to rounding."""
        terms = np.array([c.log_count + c.log_prob for c in self.classes])
        return float(logsumexp(terms))

    def __len__(self) -> int:
        return len(self.classes)


@dataclass(frozen=True)
class ExponentRow:
    """One normalized exponent next to its asymptotic reference."""

    family: str
    parameter: float
    empirical: float
    asymptotic: float


@dataclass(frozen=True)
class OracleResult:
    """Moments E[G^rho] and success probabilities P[G <= N] by explicit enumeration."""

    moments: dict[float, float]
    success: dict[int, float]


def _log1mexp(x: float) -> float:
    """log(1 - e^x) for x <= 0."""
    if x > -math.log(2.0):
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))


def compositions(n: int, k: int) -> np.ndarray:
    """All (k_1, ..., k_k) >= 0 summing to n, one per row."""
    if k == 1:
        return np.array([[n]], dtype=np.int64)
    if k == 2:
        first = np.arange(n + 1, dtype=np.int64)
        return np.column_stack([first, n - first])
    blocks = []
    for first in range(n + 1):
        rest = compositions(n - first, k - 1)
        blocks.append(np.column_stack([np.full(len(rest), first, dtype=np.int64), rest]))
    return np.concatenate(blocks)


def _multinomial(n: int, counts: Sequence[int]) -> int:
    result, remaining = 1, n
    for k in counts:
        result *= math.comb(remaining, int(k))
        remaining -= int(k)
    return result


def composition_count(alphabet_size: int, n: int) -> int:
    """C(n + |X| - 1, |X| - 1)."""
    return math.comb(n + alphabet_size - 1, alphabet_size - 1)


def build_profile(
    base: CategoricalSource, n: int, guards: Guards = DEFAULT_GUARDS
) -> GuessProfile:
    """
    Decompose the length-n strings of base into type classes.

    Classes whose log-probabilities agree within TIE_TOLERANCE (relative to
    max(1, |log p|)) are merged, so the result is strictly decreasing.

    Args:
        base: Source.
        n: String length, at least 1.
        guards: Resource caps; max_classes bounds the composition count.

    Returns:
        The profile.

    Raises:
        OutOfRangeError: n < 1.
        TooManyClassesError: More compositions than guards.max_classes.
    """
    if n < 1:
        raise OutOfRangeError(f"String length must be positive, got {n}")
    k = base.alphabet_size
    expected = composition_count(k, n)
    if expected > guards.max_classes:
        raise TooManyClassesError(
            f"{expected} compositions for |X|={k}, n={n} exceed the cap {guards.max_classes}",
            "Use a shorter length or pass --force-guard",
        )

    comps = compositions(n, k)
    log_probs = comps @ base.log_probs
    log_counts = gammaln(n + 1) - gammaln(comps + 1).sum(axis=1)
    order = np.argsort(-log_probs, kind="stable")

    classes: list[TypeClass] = []
    group_lp = group_count = group_log = None
    for idx in order:
        lp = float(log_probs[idx])
        count = _multinomial(n, comps[idx])
        if group_lp is not None and abs(lp - group_lp) <= TIE_TOLERANCE * max(1.0, abs(group_lp)):
            group_count += count
            group_log = float(np.logaddexp(group_log, log_counts[idx]))
            continue
        if group_lp is not None:
            classes.append(TypeClass(group_lp, group_count, group_log))
        group_lp, group_count, group_log = lp, count, float(log_counts[idx])
    classes.append(TypeClass(group_lp, group_count, group_log))

    logger.debug("Profile |X|=%d n=%d: %d compositions, %d classes", k, n, expected, len(classes))
    return GuessProfile(base=base, length=n, classes=tuple(classes))


def _faulhaber(m: int, power: int) -> int:
    if power == 1:
        return m * (m + 1) // 2
    if power == 2:
        return m * (m + 1) * (2 * m + 1) // 6
    return (m * (m + 1) // 2) ** 2


def _integer_power(rho: float) -> Optional[int]:
    for power in (1, 2, 3):
        if rho == power:
            return power
    return None


def select_moment_mode(
    profile: GuessProfile, rho: float, guards: Guards = DEFAULT_GUARDS
) -> MomentMode:
    """Integer closed form when rho is 1, 2 or 3, then enumeration, then the integral."""
    if _integer_power(rho) is not None:
        return MomentMode.EXACT_INTEGER
    if profile.total_strings <= guards.max_enumerated:
        return MomentMode.EXACT_ENUMERATED
    return MomentMode.INTEGRAL_APPROX


def _log_rank_power_sum_enumerated(start: int, count: int, rho: float) -> float:
    # sum_{j=start+1}^{start+count} j^rho, chunked
    partial = []
    for lo in range(start + 1, start + count + 1, ENUMERATION_CHUNK):
        hi = min(lo + ENUMERATION_CHUNK, start + count + 1)
        partial.append(float(np.sum(np.arange(lo, hi, dtype=float) ** rho)))
    return math.log(math.fsum(partial))


def _log_rank_power_sum_integral(start: int, count: int, rho: float) -> float:
    # ((b + 1/2)^(rho+1) - (a - 1/2)^(rho+1)) / (rho + 1), a = start + 1, b = start + count
    b = start + count
    # ratios straight from big-int logs; int / int underflows once offsets pass ~2^1000
    log_ratio = math.log(2 * count) - math.log(2 * b + 1)
    if log_ratio < SMALL_CLASS_LOG_RATIO:
        # midpoint rule, relative error O(ratio^2)
        return math.log(count) + rho * (math.log(2 * b + 1 - count) - math.log(2.0))
    log_upper = math.log(2 * b + 1) - math.log(2.0)
    shrink = math.log1p(-math.exp(log_ratio))
    return (rho + 1) * log_upper + _log1mexp((rho + 1) * shrink) - math.log(rho + 1)


def guesswork_moment(
    profile: GuessProfile,
    rho: float,
    mode: Optional[MomentMode | str] = None,
    guards: Guards = DEFAULT_GUARDS,
) -> float:
    """
    Natural log of E[G^rho] under the optimal guessing order.

    Args:
        profile: Type classes from build_profile.
        rho: Moment order, positive.
        mode: exact_enumerated (total strings <= guards.max_enumerated),
            exact_integer (rho in {1, 2, 3}) or integral_approx. None picks
            with select_moment_mode.
        guards: Resource caps.

    Returns:
        log E[G^rho].

    Raises:
        OutOfRangeError: rho <= 0.
        ModeUnavailableError: The requested mode does not apply.
    """
    if not rho > 0:
        raise OutOfRangeError(f"Moment order must be positive, got {rho}")
    mode = MomentMode(mode) if mode is not None else select_moment_mode(profile, rho, guards)

    if mode is MomentMode.EXACT_ENUMERATED:
        if profile.total_strings > guards.max_enumerated:
            raise ModeUnavailableError(
                f"exact_enumerated needs at most {guards.max_enumerated} strings, "
                f"profile has |X|^n = {profile.base.alphabet_size}^{profile.length}",
                "Use exact_integer (rho in 1, 2, 3) or integral_approx",
            )
        inner = [
            _log_rank_power_sum_enumerated(start, cls.count, rho)
            for start, cls in zip(profile.offsets, profile.classes)
        ]
    elif mode is MomentMode.EXACT_INTEGER:
        power = _integer_power(rho)
        if power is None:
            raise ModeUnavailableError(
                f"exact_integer needs rho in {{1, 2, 3}}, got {rho}",
                "Use exact_enumerated or integral_approx",
            )
        inner = [
            math.log(_faulhaber(start + cls.count, power) - _faulhaber(start, power))
            for start, cls in zip(profile.offsets, profile.classes)
        ]
    else:
        inner = [
            _log_rank_power_sum_integral(start, cls.count, rho)
            for start, cls in zip(profile.offsets, profile.classes)
        ]

    terms = np.array(inner) + np.array([cls.log_prob for cls in profile.classes])
    return float(logsumexp(terms))


def query_count(log_budget: float) -> Optional[int]:
    """floor(e^log_budget) when it is an exact float, snapping near-integers."""
    if log_budget >= EXACT_BUDGET_LIMIT:
        return None
    value = math.exp(log_budget)
    nearest = round(value)
    if nearest >= 1 and abs(value - nearest) <= BUDGET_SNAP_TOLERANCE * nearest:
        return int(nearest)
    return max(1, math.floor(value))


def log_success_probability(profile: GuessProfile, log_budget: float) -> float:
    """
    Natural log of P[G <= N] with N = floor(e^log_budget) queries.

    Whole classes are taken in order; the class the budget ends inside
    contributes (N - s) strings. Budgets of at least |X|^n give exactly 0.

    Raises:
        OutOfRangeError: log_budget is negative or NaN.
    """
    if math.isnan(log_budget) or log_budget < 0:
        raise OutOfRangeError(f"Log-budget must be nonnegative, got {log_budget}")

    queries = query_count(log_budget)
    terms: list[float] = []
    if queries is not None:
        if queries >= profile.total_strings:
            return 0.0
        for start, cls in zip(profile.offsets, profile.classes):
            if start + cls.count <= queries:
                terms.append(math.log(cls.count) + cls.log_prob)
                continue
            if queries > start:
                terms.append(math.log(queries - start) + cls.log_prob)
            break
    else:
        if log_budget >= profile.log_total_strings:
            return 0.0
        for start, cls in zip(profile.offsets, profile.classes):
            if math.log(start + cls.count) <= log_budget:
                terms.append(math.log(cls.count) + cls.log_prob)
                continue
            if start == 0:
                terms.append(log_budget + cls.log_prob)
            elif math.log(start) < log_budget:
                remaining = log_budget + _log1mexp(math.log(start) - log_budget)
                terms.append(remaining + cls.log_prob)
            break
    return min(0.0, float(logsumexp(terms)))


def success_probability(profile: GuessProfile, log_budget: float) -> float:
    """P[G <= floor(e^log_budget)], in [0, 1]."""
    return math.exp(log_success_probability(profile, log_budget))


def moment_exponent(base: CategoricalSource, rho: float) -> float:
    """Asymptotic growth rate rho * H_{1/(1+rho)}(base) of log E[G^rho] per character."""
    return rho * renyi_entropy(base, 1.0 / (1.0 + rho))


def empirical_exponents(
    base: CategoricalSource,
    n: int,
    rhos: Iterable[float] = (),
    gs: Iterable[float] = (),
    guards: Guards = DEFAULT_GUARDS,
) -> list[ExponentRow]:
    """
    Normalized finite-n exponents with their asymptotic references.

    Moment rows hold (1/n) log E[G^rho] against rho * H_{1/(1+rho)}. Success
    rows hold (1/n) log(1/P[G <= e^{gn}]) against the rate function, which is
    0 for g >= H and NaN where no family member has entropy g.
    """
    profile = build_profile(base, n, guards)
    rows = [
        ExponentRow(
            family="moment",
            parameter=float(rho),
            empirical=guesswork_moment(profile, rho, guards=guards) / n,
            asymptotic=moment_exponent(base, rho),
        )
        for rho in rhos
    ]
    shannon = shannon_entropy(base)
    for g in gs:
        if g >= shannon:
            reference = 0.0
        elif base.is_uniform or g > entropy_floor(base):
            reference = rate_function(base, g)
        else:
            reference = float("nan")
        rows.append(
            ExponentRow(
                family="success",
                parameter=float(g),
                empirical=-log_success_probability(profile, n * g) / n,
                asymptotic=reference,
            )
        )
    return rows


def arikan_bounds(base: CategoricalSource, n: int, rho: float) -> tuple[float, float]:
    """
    Finite-n sandwich for (1/n) log E[G^rho].

    rho * H_{1/(1+rho)} - rho * log(1 + n log|X|) / n <= (1/n) log E[G^rho] <= rho * H_{1/(1+rho)}
    """
    upper = moment_exponent(base, rho)
    slack = rho * math.log1p(n * math.log(base.alphabet_size)) / n
    return upper - slack, upper


def _string_log_probs(base: CategoricalSource, n: int) -> np.ndarray:
    # lexicographic order, first symbol most significant
    log_probs = base.log_probs
    result = log_probs.copy()
    for _ in range(n - 1):
        result = (result[:, None] + log_probs[None, :]).ravel()
    return result


def brute_force_oracle(
    base: CategoricalSource,
    n: int,
    rhos: Iterable[float] = (1.0,),
    budgets: Iterable[int] = (),
    tie_break: str = "lexicographic",
    guards: Guards = DEFAULT_GUARDS,
) -> OracleResult:
    """
    Enumerate every string, sort by probability and sum directly.

    Args:
        base: Source.
        n: String length.
        rhos: Moment orders.
        budgets: Query counts N for P[G <= N].
        tie_break: 'lexicographic' or 'reverse' order among equiprobable strings.
        guards: max_oracle_strings bounds |X|^n.

    Raises:
        TooLargeError: |X|^n exceeds guards.max_oracle_strings.
        OutOfRangeError: Unknown tie_break or n < 1.
    """
    if n < 1:
        raise OutOfRangeError(f"String length must be positive, got {n}")
    total = base.alphabet_size**n
    if total > guards.max_oracle_strings:
        raise TooLargeError(
            f"Enumerating {total} strings exceeds the oracle cap {guards.max_oracle_strings}",
        )
    log_probs = _string_log_probs(base, n)
    if tie_break == "lexicographic":
        order = np.argsort(-log_probs, kind="stable")
    elif tie_break == "reverse":
        order = total - 1 - np.argsort(-log_probs[::-1], kind="stable")
    else:
        raise OutOfRangeError(f"Unknown tie-break order: {tie_break}")

    probs = np.exp(log_probs[order])
    ranks = np.arange(1, total + 1, dtype=float)
    moments = {float(rho): math.fsum(probs * ranks**rho) for rho in rhos}
    success = {int(count): min(1.0, math.fsum(probs[: int(count)])) for count in budgets}
    return OracleResult(moments=moments, success=success)

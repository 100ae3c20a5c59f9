"""
Categorical sources and their single-source information measures.

All logarithms are natural, so every entropy is in nats. The information
random variable of a source takes the value log(1/theta_i) with probability
theta_i; Shannon entropy, varentropy and skewentropy are its mean, variance
and third central moment.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import entr, logsumexp

from .errors import (
    EmptyOrSingletonError,
    NonPositiveEntryError,
    OrderAtOneError,
    OutOfRangeError,
)

logger = logging.getLogger(__name__)

MIN_PROB = 1e-12
SUM_TOLERANCE = 1e-9
ORDER_ONE_TOLERANCE = 1e-9
UNIFORM_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class CategoricalSource:
    """A probability vector on a finite alphabet with every entry positive."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size < 2:
            raise EmptyOrSingletonError(
                "A source needs at least two symbols",
                f"Got {probs.size} entr{'y' if probs.size == 1 else 'ies'}",
            )
        if abs(probs.sum() - 1.0) > SUM_TOLERANCE:
            raise NonPositiveEntryError(
                f"Probabilities sum to {probs.sum():.12g}, not 1",
                "Build sources with make_source() to renormalize weights",
            )
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def alphabet_size(self) -> int:
        return int(self.probs.size)

    @cached_property
    def log_probs(self) -> np.ndarray:
        values = np.log(self.probs)
        values.setflags(write=False)
        return values

    @cached_property
    def is_uniform(self) -> bool:
        """True when all entries agree to within UNIFORM_TOLERANCE."""
        return bool(self.probs.max() - self.probs.min() <= UNIFORM_TOLERANCE)

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(float(p) for p in self.probs)

    def __len__(self) -> int:
        return self.alphabet_size

    def __repr__(self) -> str:
        entries = ", ".join(f"{p:.6g}" for p in self.probs)
        return f"CategoricalSource(({entries}))"


@dataclass(frozen=True)
class SecReport:
    """Shannon entropy, varentropy, skewentropy and the SEC margin of a source."""

    shannon: float
    varentropy: float
    skewentropy: float
    margin: float
    satisfies_sec: bool

    @property
    def is_degenerate(self) -> bool:
        """The uniform source: V = S = 0 and the margin is exactly zero."""
        return self.varentropy == 0.0

    @property
    def status(self) -> str:
        if self.is_degenerate:
            return "degenerate"
        return "pass" if self.satisfies_sec else "fail"


class InformationMoments(NamedTuple):
    """Closed-form (H, V, S) triple."""

    shannon: float
    varentropy: float
    skewentropy: float


def make_source(weights: Sequence[float] | np.ndarray, min_prob: float = MIN_PROB) -> CategoricalSource:
    """
    Validate nonnegative weights and normalize them into a source.

    Args:
        weights: One nonnegative weight per symbol.
        min_prob: Smallest admissible probability after normalization.

    Returns:
        A source whose entries sum to 1.

    Raises:
        EmptyOrSingletonError: Fewer than two weights.
        NonPositiveEntryError: A weight is negative or not finite, all weights
            are zero, or an entry falls below min_prob after normalization.
    """
    values = np.asarray(weights, dtype=float).ravel()
    if values.size < 2:
        raise EmptyOrSingletonError(
            "A source needs at least two symbols",
            f"Got {values.size} weight(s)",
        )
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise NonPositiveEntryError(
            "Weights must be finite and nonnegative",
            f"Got {values.tolist()}",
        )
    total = values.sum()
    if total <= 0:
        raise NonPositiveEntryError("Weights sum to zero", "At least one weight must be positive")

    probs = values / total
    smallest = probs.min()
    if smallest < min_prob:
        raise NonPositiveEntryError(
            f"Entry {int(probs.argmin())} is {smallest:.3g} after normalization",
            f"Every probability must be at least {min_prob:g}; boundary sources are excluded",
        )
    return CategoricalSource(probs / probs.sum())


def uniform_source(alphabet_size: int) -> CategoricalSource:
    """The uniform source on alphabet_size symbols."""
    return make_source(np.ones(alphabet_size))


def binary_source(phi: float) -> CategoricalSource:
    """The binary source (phi, 1 - phi)."""
    return make_source([phi, 1.0 - phi])


def construction_source(alphabet_size: int, eps: float) -> CategoricalSource:
    """Source with alphabet_size - 1 equal entries (1 - eps)/(|X| - 1) and a last entry eps."""
    _check_construction(alphabet_size, eps)
    bulk = (1.0 - eps) / (alphabet_size - 1)
    return make_source([bulk] * (alphabet_size - 1) + [eps])


def information_moments(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorised H, V, S and SEC margin for a stack of probability vectors.

    Args:
        probs: Array of shape (..., k) whose last axis holds probabilities.

    Returns:
        Arrays (shannon, varentropy, skewentropy, margin) over the leading axes.
        Rows that are uniform within UNIFORM_TOLERANCE get V = S = margin = 0.
    """
    probs = np.asarray(probs, dtype=float)
    info = -np.log(probs)
    shannon = entr(probs).sum(axis=-1)
    deviation = info - shannon[..., None]
    varentropy = np.sum(probs * deviation**2, axis=-1)
    skewentropy = np.sum(probs * deviation**3, axis=-1)

    uniform = (probs.max(axis=-1) - probs.min(axis=-1)) <= UNIFORM_TOLERANCE
    varentropy = np.where(uniform, 0.0, varentropy)
    skewentropy = np.where(uniform, 0.0, skewentropy)
    margin = varentropy**2 + 2.0 * shannon * varentropy - shannon * skewentropy
    return shannon, varentropy, skewentropy, margin


def shannon_entropy(src: CategoricalSource) -> float:
    """Shannon entropy sum theta_i log(1/theta_i), in nats."""
    return float(entr(src.probs).sum())


def renyi_entropy(src: CategoricalSource, order: float, route_order_one: bool = True) -> float:
    """
    Renyi entropy (1/(1 - order)) log sum theta_i^order, in nats.

    Order 0 gives log |X|, order inf gives the min-entropy -log max theta_i.

    Raises:
        OutOfRangeError: Negative or NaN order.
        OrderAtOneError: Order within 1e-9 of 1 with routing disabled.
    """
    if math.isnan(order) or order < 0:
        raise OutOfRangeError(f"Renyi order must be nonnegative, got {order}")
    if abs(order - 1.0) <= ORDER_ONE_TOLERANCE:
        if not route_order_one:
            raise OrderAtOneError(
                f"Renyi order {order} is at the removable singularity",
                "Use shannon_entropy() or enable routing",
            )
        return shannon_entropy(src)
    if order == 0:
        return math.log(src.alphabet_size)
    if math.isinf(order):
        return float(-src.log_probs.max())
    return float(logsumexp(order * src.log_probs) / (1.0 - order))


def varentropy(src: CategoricalSource) -> float:
    """Variance of the information random variable, in nats squared."""
    return float(information_moments(src.probs)[1])


def skewentropy(src: CategoricalSource) -> float:
    """Third central moment of the information random variable, in nats cubed."""
    return float(information_moments(src.probs)[2])


def sec_report(src: CategoricalSource) -> SecReport:
    """Evaluate the skewentropy condition V^2 + 2HV - HS > 0."""
    shannon, var, skew, margin = (float(v) for v in information_moments(src.probs))
    return SecReport(
        shannon=shannon,
        varentropy=var,
        skewentropy=skew,
        margin=margin,
        satisfies_sec=margin > 0,
    )


def binary_entropy(phi: float) -> float:
    """h(phi) = phi log(1/phi) + (1 - phi) log(1/(1 - phi)); h(0) = h(1) = 0."""
    return float(entr(phi) + entr(1.0 - phi))


def binary_closed_forms(phi: float) -> InformationMoments:
    """
    Closed forms of H, V, S for the binary source with smaller entry phi.

    Raises:
        OutOfRangeError: phi outside (0, 0.5).
    """
    if not 0.0 < phi < 0.5:
        raise OutOfRangeError(f"phi must lie in (0, 0.5), got {phi}")
    log_odds = math.log((1.0 - phi) / phi)
    spread = phi * (1.0 - phi)
    return InformationMoments(
        shannon=binary_entropy(phi),
        varentropy=spread * log_odds**2,
        skewentropy=spread * (1.0 - 2.0 * phi) * log_odds**3,
    )


def _check_construction(alphabet_size: int, eps: float) -> None:
    if alphabet_size < 3:
        raise OutOfRangeError(
            f"The construction needs at least 3 symbols, got {alphabet_size}",
            "Binary sources always satisfy the SEC",
        )
    if not 0.0 < eps < 1.0 / alphabet_size:
        raise OutOfRangeError(f"eps must lie in (0, 1/{alphabet_size}), got {eps}")


def construction_closed_forms(alphabet_size: int, eps: float) -> InformationMoments:
    """
    Closed forms of H, V, S for construction_source(alphabet_size, eps).

    Raises:
        OutOfRangeError: alphabet_size < 3 or eps outside (0, 1/alphabet_size).
    """
    _check_construction(alphabet_size, eps)
    log_rest = math.log(alphabet_size - 1)
    gap = math.log((1.0 - eps) / eps) - log_rest
    spread = eps * (1.0 - eps)
    return InformationMoments(
        shannon=(1.0 - eps) * log_rest + binary_entropy(eps),
        varentropy=spread * gap**2,
        skewentropy=spread * (1.0 - 2.0 * eps) * gap**3,
    )

"""
Tilted families, KL divergence and the guesswork rate function.

The tilt of order alpha is tau_i(theta, alpha) = theta_i^alpha / sum_j theta_j^alpha.
Everything here works on log-probabilities, so large orders neither overflow
nor lose the small entries before the final exponentiation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy.optimize import bisect
from scipy.special import logsumexp, rel_entr

from .config import ordered_map
from .errors import (
    DimensionMismatchError,
    IllConditionedError,
    OutOfEntropyRangeError,
    OutOfRangeError,
    UniformBaseError,
)
from .source_stats import (
    MIN_PROB,
    CategoricalSource,
    skewentropy,
    varentropy,
)

logger = logging.getLogger(__name__)

ENTROPY_TOLERANCE = 1e-10
MAX_BISECTION_ITERATIONS = 200
MAX_BRACKET_ALPHA = 2.0**64
CLAMP_REPORT_TOLERANCE = 1e-9
TIE_TOLERANCE = 1e-12

FD_STEP = 1e-4
FD_MIN_PROB = 1e-6
FD_ABS_TOLERANCE = 1e-6
FD_REL_TOLERANCE = 1e-3


@dataclass(frozen=True)
class TiltPoint:
    """One member tau(theta, alpha) of a tilted family with its summary statistics."""

    alpha: float
    dist: CategoricalSource
    entropy: float
    kl_to_base: float

    @property
    def member(self) -> str:
        """'high' for alpha < 1, 'base' at alpha = 1, 'low' for alpha > 1."""
        if self.alpha < 1.0:
            return "high"
        if self.alpha > 1.0:
            return "low"
        return "base"


def _log_tilt(log_probs: np.ndarray, alpha: float) -> np.ndarray:
    scaled = alpha * log_probs
    return scaled - logsumexp(scaled)


def _entropy_of_log(log_probs: np.ndarray) -> float:
    return float(-np.sum(np.exp(log_probs) * log_probs))


def _check_alpha(alpha: float) -> None:
    if math.isnan(alpha) or alpha < 0:
        raise OutOfRangeError(
            f"Tilt order must be nonnegative, got {alpha}",
            "Negative tilts are not supported",
        )


def tilt(base: CategoricalSource, alpha: float) -> TiltPoint:
    """
    Tilt a source by order alpha.

    Entries that underflow below MIN_PROB are clamped there and the vector is
    renormalized; entropy and KL are computed from the unclamped log-domain
    tilt.

    Raises:
        OutOfRangeError: alpha is negative.
    """
    _check_alpha(alpha)
    log_tilted = _log_tilt(base.log_probs, alpha)
    probs = np.exp(log_tilted)

    clamped = np.maximum(probs, MIN_PROB)
    clamped /= clamped.sum()
    drift = float(np.max(np.abs(clamped - probs) / clamped))
    if drift > CLAMP_REPORT_TOLERANCE:
        logger.warning(
            "Tilt of order %.6g clamped %d entr(ies) at %g (max relative change %.3g)",
            alpha,
            int(np.sum(probs < MIN_PROB)),
            MIN_PROB,
            drift,
        )

    kl = float(np.sum(probs * (log_tilted - base.log_probs)))
    return TiltPoint(
        alpha=float(alpha),
        dist=CategoricalSource(clamped),
        entropy=_entropy_of_log(log_tilted),
        kl_to_base=max(0.0, kl),
    )


def kl_divergence(p: CategoricalSource, q: CategoricalSource) -> float:
    """
    KL divergence D(p || q) in nats.

    Raises:
        DimensionMismatchError: p and q have different alphabet sizes.
    """
    if p.alphabet_size != q.alphabet_size:
        raise DimensionMismatchError(
            f"Alphabet sizes differ: {p.alphabet_size} vs {q.alphabet_size}",
        )
    return max(0.0, float(rel_entr(p.probs, q.probs).sum()))


def cross_entropy(p: CategoricalSource, q: CategoricalSource) -> float:
    """H(p || q) = sum p_i log(1/q_i)."""
    if p.alphabet_size != q.alphabet_size:
        raise DimensionMismatchError(
            f"Alphabet sizes differ: {p.alphabet_size} vs {q.alphabet_size}",
        )
    return float(-np.sum(p.probs * q.log_probs))


def _require_non_uniform(base: CategoricalSource) -> None:
    if base.is_uniform:
        raise UniformBaseError(
            "The tilted family of the uniform source is constant",
            f"Its entropy is log {base.alphabet_size} for every order",
        )


def family_entropy(base: CategoricalSource, alpha: float) -> float:
    """
    Entropy H(tau(base, alpha)) of a family member.

    Raises:
        UniformBaseError: base is uniform (the map is the constant log |X|).
        OutOfRangeError: alpha is negative.
    """
    _require_non_uniform(base)
    _check_alpha(alpha)
    return _entropy_of_log(_log_tilt(base.log_probs, alpha))


def entropy_floor(base: CategoricalSource) -> float:
    """Limit of family_entropy as alpha grows: log of the number of maximal entries."""
    top = base.probs.max()
    ties = int(np.sum(base.probs >= top * (1.0 - TIE_TOLERANCE)))
    return math.log(ties)


def solve_alpha_for_entropy(
    base: CategoricalSource, g: float, tol: float = ENTROPY_TOLERANCE
) -> float:
    """
    Find the tilt order whose family member has entropy g.

    The bracket starts at [0, 1] and doubles its upper end until the family
    entropy drops below g; bisection then runs to machine precision.

    Args:
        base: Non-uniform source.
        g: Target entropy strictly between entropy_floor(base) and log |X|.
        tol: Accepted residual |family_entropy - g|.

    Returns:
        The order alpha >= 0.

    Raises:
        UniformBaseError: base is uniform.
        OutOfEntropyRangeError: g is not attainable.
    """
    _require_non_uniform(base)
    lower, upper = entropy_floor(base), math.log(base.alphabet_size)
    if not lower < g < upper:
        raise OutOfEntropyRangeError(
            f"Entropy {g:.12g} is outside the attainable range ({lower:.12g}, {upper:.12g})",
            "Targets must lie strictly between log(#maximal entries) and log |X|",
        )

    log_probs = base.log_probs

    def residual(alpha: float) -> float:
        return _entropy_of_log(_log_tilt(log_probs, alpha)) - g

    hi = 1.0
    while residual(hi) > 0:
        hi *= 2.0
        if hi > MAX_BRACKET_ALPHA:
            raise OutOfEntropyRangeError(
                f"Entropy {g:.12g} is too close to the floor {lower:.12g} to bracket",
            )
    if residual(hi) == 0:
        return hi

    alpha, result = bisect(
        residual,
        0.0,
        hi,
        xtol=1e-15,
        rtol=4 * np.finfo(float).eps,
        maxiter=MAX_BISECTION_ITERATIONS,
        full_output=True,
        disp=False,
    )
    error = abs(residual(alpha))
    logger.debug(
        "alpha(%.12g) = %.15g after %d iterations (residual %.3g)",
        g,
        alpha,
        result.iterations,
        error,
    )
    if error > tol:
        logger.warning("Entropy residual %.3g exceeds tolerance %.3g at g=%.12g", error, tol, g)
    return float(alpha)


def rate_function(base: CategoricalSource, g: float) -> float:
    """
    Large-deviations rate Lambda*(g) = D(tau(base, alpha(g)) || base).

    The uniform source uses its closed form log |X| - g.

    Raises:
        OutOfEntropyRangeError: g outside the attainable range.
    """
    if base.is_uniform:
        top = math.log(base.alphabet_size)
        if not 0.0 <= g <= top:
            raise OutOfEntropyRangeError(
                f"Guesswork budget {g:.12g} is outside [0, log {base.alphabet_size}]",
            )
        return top - g
    alpha = solve_alpha_for_entropy(base, g)
    log_tilted = _log_tilt(base.log_probs, alpha)
    kl = float(np.sum(np.exp(log_tilted) * (log_tilted - base.log_probs)))
    return max(0.0, kl)


def family_scan(
    base: CategoricalSource, alphas: Iterable[float], threads: Optional[int] = None
) -> list[TiltPoint]:
    """One TiltPoint per requested order, in the order given."""
    return ordered_map(lambda alpha: tilt(base, alpha), alphas, threads)


def tilted_cross_varentropy(base: CategoricalSource, alpha: float) -> float:
    """V(tau(base, alpha) || base): variance of log(1/theta_i) under the tilted source."""
    _check_alpha(alpha)
    weights = np.exp(_log_tilt(base.log_probs, alpha))
    info = -base.log_probs
    centered = info - np.sum(weights * info)
    return float(np.sum(weights * centered**2))


def _centered_renyi_shift(log_tilted: np.ndarray, beta: float) -> float:
    # H_beta(tau) - H(tau) from centered information, no 1/(1-beta) cancellation
    weights = np.exp(log_tilted)
    info = -log_tilted
    deviation = info - np.sum(weights * info)
    t = beta - 1.0
    return float(-np.log1p(np.sum(weights * np.expm1(-t * deviation))) / t)


def tilted_renyi_entropy(base: CategoricalSource, alpha: float, beta: float) -> float:
    """H_beta(tau(base, alpha)); beta = 1 gives the Shannon entropy of the member."""
    _check_alpha(alpha)
    if beta < 0:
        raise OutOfRangeError(f"Renyi order must be nonnegative, got {beta}")
    log_tilted = _log_tilt(base.log_probs, alpha)
    entropy = _entropy_of_log(log_tilted)
    if beta == 1.0:
        return entropy
    return entropy + _centered_renyi_shift(log_tilted, beta)


@dataclass(frozen=True)
class DerivativeCheck:
    """A finite-difference estimate set against its closed form."""

    name: str
    estimate: float
    closed_form: float

    @property
    def residual(self) -> float:
        return abs(self.estimate - self.closed_form)

    @property
    def tolerance(self) -> float:
        return max(FD_ABS_TOLERANCE, FD_REL_TOLERANCE * abs(self.closed_form))

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass(frozen=True)
class DerivativeReport:
    """Five derivative identities of the tilted family at alpha = beta = 1."""

    base: CategoricalSource
    step: float
    checks: tuple[DerivativeCheck, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def residuals(self) -> dict[str, float]:
        return {check.name: check.residual for check in self.checks}


def derivative_checks(base: CategoricalSource, step: float = FD_STEP) -> DerivativeReport:
    """
    Central finite differences of the tilted family against closed forms.

    Checks, all at alpha = beta = 1:
      d/dalpha H(tau(theta, alpha))                  = -V
      d/dbeta H_beta(theta)                          = -V/2
      d2/dalpha dbeta H_beta(tau(theta, alpha))      = -V + S/2
      d/dalpha V(tau(theta, alpha) || theta)         = -S
      d2/dalpha dbeta H(tau(theta, alpha * beta))    = -2V + S

    Mixed partials use the four-point cross stencil. H_beta is evaluated as
    H plus a centered cumulant term, so the stencil never divides a rounding
    error by (1 - beta).

    Raises:
        IllConditionedError: some theta_i < 1e-6.
    """
    if base.probs.min() < FD_MIN_PROB:
        raise IllConditionedError(
            f"Smallest entry {base.probs.min():.3g} is below {FD_MIN_PROB:g}",
            "Finite differences are unreliable this close to the boundary",
        )
    h = step
    var, skew = varentropy(base), skewentropy(base)
    log_probs = base.log_probs

    def member_entropy(alpha: float) -> float:
        return _entropy_of_log(_log_tilt(log_probs, alpha))

    def renyi_shift(alpha: float, beta: float) -> float:
        return _centered_renyi_shift(_log_tilt(log_probs, alpha), beta)

    d_alpha = (member_entropy(1 + h) - member_entropy(1 - h)) / (2 * h)
    d_beta = (renyi_shift(1.0, 1 + h) - renyi_shift(1.0, 1 - h)) / (2 * h)
    # the entropy term is shared along each alpha row and cancels in the stencil
    d_alpha_beta = (
        renyi_shift(1 + h, 1 + h)
        - renyi_shift(1 + h, 1 - h)
        - renyi_shift(1 - h, 1 + h)
        + renyi_shift(1 - h, 1 - h)
    ) / (4 * h * h)
    d_cross_var = (
        tilted_cross_varentropy(base, 1 + h) - tilted_cross_varentropy(base, 1 - h)
    ) / (2 * h)
    d_product = (
        member_entropy((1 + h) * (1 + h))
        - 2 * member_entropy((1 + h) * (1 - h))
        + member_entropy((1 - h) * (1 - h))
    ) / (4 * h * h)

    return DerivativeReport(
        base=base,
        step=h,
        checks=(
            DerivativeCheck("entropy_alpha", d_alpha, -var),
            DerivativeCheck("renyi_beta", d_beta, -0.5 * var),
            DerivativeCheck("renyi_alpha_beta", d_alpha_beta, -var + 0.5 * skew),
            DerivativeCheck("cross_varentropy_alpha", d_cross_var, -skew),
            DerivativeCheck("entropy_product", d_product, -2 * var + skew),
        ),
    )

"""Verification suites: numerical identities, budgeted orderings and engine cross-checks."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .budget import (
    Ordering,
    TABLE1_LENGTHS,
    TABLE1_TOTAL_BITS,
    match_sources_to_budget,
    moment_sweep,
    moment_violations,
    rate_sweep,
    rate_violations,
    uniform_moment_sweep,
    uniform_rate_sweep,
)
from .config import DEFAULT_GUARDS, Guards
from .errors import GuessworkError, OutOfRangeError
from .guesswork import (
    MomentMode,
    arikan_bounds,
    brute_force_oracle,
    build_profile,
    compositions,
    guesswork_moment,
    log_success_probability,
    moment_exponent,
    success_probability,
)
from .secscan import (
    binary_sec_scan,
    certify_batch,
    sample_near_uniform,
    sample_simplex,
    sec_failure_witness,
)
from .source_stats import (
    CategoricalSource,
    binary_source,
    make_source,
    renyi_entropy,
    shannon_entropy,
    uniform_source,
)
from .tilt import derivative_checks, rate_function

logger = logging.getLogger(__name__)

SUITES = ("derivatives", "theorems", "oracle", "convergence")

CONVERGENCE_SOURCE = (0.3, 0.7)
CONVERGENCE_LENGTHS = (100, 500, 2000)
CONVERGENCE_RHOS = (0.5, 1.0, 2.0)
CONVERGENCE_CONSTANT = 5.0
# C stays below 5 for these orders on binary sources; larger orders are only sandwiched
CONSTANT_CHECKED_RHOS = (0.5, 1.0)
RATE_LENGTH = 2000
RATE_BUDGETS = (0.3, 0.4, 0.5)
RATE_TOLERANCE = 0.02
THRESHOLD_OFFSET = 0.05
ORACLE_RELATIVE_TOLERANCE = 1e-12
ORACLE_RHOS = (0.5, 1.0, 2.0, 3.0)
ORACLE_MAX_STRINGS = 2**16
ORACLE_BUDGET_POINTS = 20
# interior lattice resolution giving exactly 10 points per alphabet size
ORACLE_GRID_RESOLUTION = {2: 11, 3: 6, 4: 6}
FIG4_LOG_BUDGET = 3.0
# orders at which finite-n E[G^rho] over the matched binary set increases with n
FINITE_ORDERING_RHOS = (2.0, 3.0)


@dataclass(frozen=True)
class CheckResult:
    """One verification case."""

    suite: str
    case: str
    status: str
    residual: Optional[float]

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        residual = None if self.residual is None else float(f"{self.residual:.12g}")
        return {"suite": self.suite, "case": self.case, "status": self.status, "residual": residual}


def _relative_error(value: float, reference: float) -> float:
    if reference == 0:
        return abs(value)
    return abs(value - reference) / abs(reference)


class Verifier:
    """Run the verification suites and collect one CheckResult per case."""

    def __init__(
        self,
        seed: int = 0,
        derivative_sources: int = 20,
        binary_sweep_sources: int = 50,
        uniform_sweep_sources: int = 100,
        certify_samples: int = 10_000,
        oracle_sources: int = 10,
        guards: Guards = DEFAULT_GUARDS,
        threads: Optional[int] = None,
    ) -> None:
        self.seed = seed
        self.derivative_sources = derivative_sources
        self.binary_sweep_sources = binary_sweep_sources
        self.uniform_sweep_sources = uniform_sweep_sources
        self.certify_samples = certify_samples
        self.oracle_sources = oracle_sources
        self.guards = guards
        self.threads = threads
        self.results: list[CheckResult] = []

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def run(self, suite: str = "all") -> list[CheckResult]:
        """Run one suite (or all of them, in a fixed order) and return its results."""
        if suite != "all" and suite not in SUITES:
            raise OutOfRangeError(f"Unknown suite: {suite}", f"Choose from {', '.join(SUITES)}, all")
        self.results = []
        checks: dict[str, Callable[[], None]] = {
            "derivatives": self._check_derivatives,
            "theorems": self._check_theorems,
            "oracle": self._check_oracle,
            "convergence": self._check_convergence,
        }
        for name in SUITES if suite == "all" else (suite,):
            logger.debug("Running suite %s", name)
            checks[name]()
        return self.results

    def _record(self, suite: str, case: str, passed: bool, residual: Optional[float]) -> None:
        self.results.append(CheckResult(suite, case, "pass" if passed else "fail", residual))

    def _guarded(self, suite: str, case: str, check: Callable[[], tuple[bool, Optional[float]]]) -> None:
        try:
            passed, residual = check()
        except GuessworkError as e:
            logger.warning("%s/%s raised: %s", suite, case, e.message)
            passed, residual = False, None
        except Exception:
            logger.exception("%s/%s crashed", suite, case)
            passed, residual = False, None
        self._record(suite, case, passed, residual)

    def _rng(self, offset: int) -> np.random.Generator:
        return np.random.default_rng(self.seed + offset)

    def _random_binary(self, count: int, offset: int) -> list[CategoricalSource]:
        phis = self._rng(offset).uniform(0.01, 0.49, size=count)
        return [binary_source(float(phi)) for phi in phis]

    def _well_conditioned_sources(self, count: int) -> list[CategoricalSource]:
        rng = self._rng(1)
        sources: list[CategoricalSource] = []
        while len(sources) < count:
            k = int(rng.integers(2, 6))
            probs = rng.dirichlet(np.ones(k))
            if probs.min() >= 0.01:
                sources.append(make_source(probs))
        return sources

    def _mixed_sources(self, count: int, offset: int) -> list[CategoricalSource]:
        per_dimension = math.ceil(count / 4)
        sources: list[CategoricalSource] = []
        for k in (2, 3, 4, 5):
            sources.extend(sample_simplex(k, per_dimension, seed=self.seed + offset + k))
        return sources[:count]

    def _check_derivatives(self) -> None:
        for index, base in enumerate(self._well_conditioned_sources(self.derivative_sources)):
            try:
                report = derivative_checks(base)
            except Exception:
                logger.exception("derivatives/source%d crashed", index)
                self._record("derivatives", f"source{index}", False, None)
                continue
            for check in report.checks:
                self._record("derivatives", f"source{index}:{check.name}", check.passed, check.residual)

    def _check_theorems(self) -> None:
        suite = "theorems"
        binary = self._random_binary(self.binary_sweep_sources, offset=2)
        mixed = self._mixed_sources(self.uniform_sweep_sources, offset=3)

        def sweep_check(run: Callable[[], list]) -> Callable[[], tuple[bool, Optional[float]]]:
            def check() -> tuple[bool, Optional[float]]:
                comparisons = run()
                worst = max(c.gap if c.expected is Ordering.LESS else -c.gap for c in comparisons)
                return all(c.holds for c in comparisons), worst

            return check

        self._guarded(
            suite, "moment_ordering", sweep_check(lambda: moment_sweep(binary, threads=self.threads))
        )
        self._guarded(
            suite, "rate_ordering", sweep_check(lambda: rate_sweep(binary, threads=self.threads))
        )
        self._guarded(
            suite,
            "uniform_moment_ordering",
            sweep_check(lambda: uniform_moment_sweep(mixed, threads=self.threads)),
        )
        self._guarded(
            suite,
            "uniform_rate_ordering",
            sweep_check(lambda: uniform_rate_sweep(mixed, threads=self.threads)),
        )

        def uniform_closed_form() -> tuple[bool, Optional[float]]:
            worst = 0.0
            for k in (2, 3, 4, 5):
                top = math.log(k)
                for g in np.linspace(0.05, 0.95, 10) * top:
                    worst = max(worst, abs(rate_function(uniform_source(k), g) - (top - g)))
            return worst <= 1e-12, worst

        self._guarded(suite, "uniform_rate_closed_form", uniform_closed_form)

        def binary_totality() -> tuple[bool, Optional[float]]:
            points = binary_sec_scan()
            return all(p.report.satisfies_sec for p in points), min(p.report.margin for p in points)

        self._guarded(suite, "binary_sec", binary_totality)

        for k in range(3, 17):

            def witness(k: int = k) -> tuple[bool, Optional[float]]:
                found = sec_failure_witness(k)
                return found.report.margin <= 0, found.report.margin

            self._guarded(suite, f"sec_failure_witness_k{k}", witness)

        for k in range(2, 9):

            def soundness(k: int = k) -> tuple[bool, Optional[float]]:
                sources = sample_near_uniform(k, self.certify_samples, seed=self.seed + k, spread=3.0)
                certificates = certify_batch(sources, threads=self.threads)
                certified = [c for c in certificates if c.certified]
                box_ok = all(c.certified for c in certificates if c.in_box)
                margin = min((c.report.margin for c in certified), default=None)
                return box_ok, margin

            self._guarded(suite, f"near_uniform_certificate_k{k}", soundness)

        witness3 = sec_failure_witness(3)
        self._guarded(
            suite,
            "moment_violation_search",
            lambda: (len(moment_violations(witness3.theta)) > 0, None),
        )
        self._guarded(
            suite,
            "rate_violation_search",
            lambda: (len(rate_violations(witness3.theta)) > 0, None),
        )

    def _oracle_grid(self, k: int) -> list[CategoricalSource]:
        """Interior lattice points of the k-simplex, lexicographic; ties included."""
        resolution = ORACLE_GRID_RESOLUTION[k]
        points = compositions(resolution - k, k) + 1
        return [make_source(row / resolution) for row in points[: self.oracle_sources]]

    def _oracle_cases(self) -> list[tuple[int, int]]:
        return [
            (k, n)
            for k in (2, 3, 4)
            for n in range(1, 9)
            if k**n <= ORACLE_MAX_STRINGS
        ]

    def _check_oracle(self) -> None:
        for k, n in self._oracle_cases():
            sources = self._oracle_grid(k)

            def check(k: int = k, n: int = n, sources: list = sources) -> tuple[bool, Optional[float]]:
                total = k**n
                budgets = sorted(
                    {int(b) for b in np.round(np.geomspace(1, total, ORACLE_BUDGET_POINTS))}
                )
                worst = 0.0
                for base in sources:
                    profile = build_profile(base, n, self.guards)
                    oracle = brute_force_oracle(base, n, ORACLE_RHOS, budgets, guards=self.guards)
                    swapped = brute_force_oracle(
                        base, n, ORACLE_RHOS, budgets, tie_break="reverse", guards=self.guards
                    )
                    for rho in ORACLE_RHOS:
                        engine = math.exp(
                            guesswork_moment(profile, rho, MomentMode.EXACT_ENUMERATED, self.guards)
                        )
                        worst = max(
                            worst,
                            _relative_error(engine, oracle.moments[rho]),
                            _relative_error(swapped.moments[rho], oracle.moments[rho]),
                        )
                    for budget in budgets:
                        engine = success_probability(profile, math.log(budget))
                        worst = max(
                            worst,
                            _relative_error(engine, oracle.success[budget]),
                            _relative_error(swapped.success[budget], oracle.success[budget]),
                        )
                return worst <= ORACLE_RELATIVE_TOLERANCE, worst

            self._guarded("oracle", f"k{k}_n{n}", check)

    def _check_convergence(self) -> None:
        suite = "convergence"
        base = make_source(CONVERGENCE_SOURCE)
        for n in CONVERGENCE_LENGTHS:
            profile = build_profile(base, n, self.guards)
            for rho in CONVERGENCE_RHOS:

                def moment(profile=profile, n: int = n, rho: float = rho) -> tuple[bool, Optional[float]]:
                    empirical = guesswork_moment(profile, rho, guards=self.guards) / n
                    lower, upper = arikan_bounds(base, n, rho)
                    inside = lower - 1e-9 <= empirical <= upper + 1e-9
                    constant = n * abs(empirical - moment_exponent(base, rho))
                    if rho in CONSTANT_CHECKED_RHOS:
                        inside = inside and constant <= CONVERGENCE_CONSTANT
                    return inside, constant

                self._guarded(suite, f"moment_n{n}_rho{rho:g}", moment)

        profile = build_profile(base, RATE_LENGTH, self.guards)
        for g in RATE_BUDGETS:

            def rate(g: float = g) -> tuple[bool, Optional[float]]:
                empirical = -log_success_probability(profile, RATE_LENGTH * g) / RATE_LENGTH
                residual = abs(empirical - rate_function(base, g))
                return residual <= RATE_TOLERANCE, residual

            self._guarded(suite, f"rate_g{g:g}", rate)

        def threshold() -> tuple[bool, Optional[float]]:
            h = shannon_entropy(base)
            below = success_probability(profile, RATE_LENGTH * (h - THRESHOLD_OFFSET))
            above = success_probability(profile, RATE_LENGTH * (h + THRESHOLD_OFFSET))
            return below <= 0.1 and above >= 0.9, above - below

        self._guarded(suite, "success_threshold", threshold)

        table1 = match_sources_to_budget(TABLE1_TOTAL_BITS * math.log(2.0), TABLE1_LENGTHS)

        def moment_ordering() -> tuple[bool, Optional[float]]:
            totals = [n * renyi_entropy(src, 0.5) for n, src in zip(TABLE1_LENGTHS, table1)]
            steps = np.diff(totals)
            return bool(np.all(steps > 0)), float(steps.min())

        def finite_moment_ordering(rho: float) -> Callable[[], tuple[bool, Optional[float]]]:
            def check() -> tuple[bool, Optional[float]]:
                values = [
                    guesswork_moment(
                        build_profile(src, n, self.guards), rho, MomentMode.EXACT_INTEGER
                    )
                    for n, src in zip(TABLE1_LENGTHS, table1)
                ]
                steps = np.diff(values)
                return bool(np.all(steps > 0)), float(steps.min())

            return check

        def success_ordering() -> tuple[bool, Optional[float]]:
            values = [
                success_probability(build_profile(src, n, self.guards), FIG4_LOG_BUDGET)
                for n, src in zip(TABLE1_LENGTHS, table1)
            ]
            steps = np.diff(values)
            return bool(np.all(steps > 0)), float(steps.min())

        self._guarded(suite, "table1_moment_ordering", moment_ordering)
        for rho in FINITE_ORDERING_RHOS:
            self._guarded(
                suite, f"table1_finite_moment_ordering_rho{rho:g}", finite_moment_ordering(rho)
            )
        self._guarded(suite, "table1_success_ordering", success_ordering)

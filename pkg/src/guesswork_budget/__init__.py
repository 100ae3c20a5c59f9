"""
guesswork-budget - Guesswork security metrics for memoryless sources.
"""

__version__ = "0.1.0"

from .budget import (  # noqa: E402
    BudgetComparison,
    Ordering,
    compare_moment_exponents,
    compare_rate_functions,
    compare_sources,
    compare_vs_uniform_moments,
    compare_vs_uniform_rate,
    entropy_ratio,
    match_binary_entropy,
    match_sources_to_budget,
    moment_violations,
    rate_violations,
)
from .errors import (  # noqa: E402
    ConfigError,
    DimensionMismatchError,
    EmptyOrSingletonError,
    EntropyOrderError,
    EqualEntropyError,
    GuessworkError,
    IllConditionedError,
    InfeasibleBudgetError,
    ModeUnavailableError,
    NonPositiveEntryError,
    OrderAtOneError,
    OutOfEntropyRangeError,
    OutOfRangeError,
    OutOfRegimeError,
    OutputError,
    ParameterError,
    ResourceGuardError,
    SecInconsistencyError,
    SourceError,
    TooLargeError,
    TooManyClassesError,
    UniformBaseError,
    WitnessNotFoundError,
)
from .guesswork import (  # noqa: E402
    GuessProfile,
    MomentMode,
    TypeClass,
    brute_force_oracle,
    build_profile,
    empirical_exponents,
    guesswork_moment,
    log_success_probability,
    select_moment_mode,
    success_probability,
)
from .secscan import (  # noqa: E402
    NearUniformCertificate,
    SecLabel,
    SimplexGrid,
    near_uniform_certificate,
    sample_simplex,
    scan_simplex,
    sec_failure_witness,
)
from .source_stats import (  # noqa: E402
    CategoricalSource,
    SecReport,
    binary_closed_forms,
    construction_closed_forms,
    make_source,
    renyi_entropy,
    sec_report,
    shannon_entropy,
    skewentropy,
    varentropy,
)
from .tilt import (  # noqa: E402
    TiltPoint,
    derivative_checks,
    family_entropy,
    family_scan,
    kl_divergence,
    rate_function,
    solve_alpha_for_entropy,
    tilt,
)

__all__ = [
    # Sources
    "CategoricalSource",
    "SecReport",
    "make_source",
    "shannon_entropy",
    "renyi_entropy",
    "varentropy",
    "skewentropy",
    "sec_report",
    "binary_closed_forms",
    "construction_closed_forms",
    # Tilted families
    "TiltPoint",
    "tilt",
    "kl_divergence",
    "family_entropy",
    "solve_alpha_for_entropy",
    "rate_function",
    "family_scan",
    "derivative_checks",
    # Guesswork
    "GuessProfile",
    "TypeClass",
    "MomentMode",
    "build_profile",
    "guesswork_moment",
    "select_moment_mode",
    "success_probability",
    "log_success_probability",
    "empirical_exponents",
    "brute_force_oracle",
    # Budgets
    "BudgetComparison",
    "Ordering",
    "entropy_ratio",
    "compare_moment_exponents",
    "compare_vs_uniform_moments",
    "compare_rate_functions",
    "compare_vs_uniform_rate",
    "compare_sources",
    "match_binary_entropy",
    "match_sources_to_budget",
    "moment_violations",
    "rate_violations",
    # SEC landscape
    "SimplexGrid",
    "SecLabel",
    "NearUniformCertificate",
    "scan_simplex",
    "sample_simplex",
    "near_uniform_certificate",
    "sec_failure_witness",
    # Exceptions
    "GuessworkError",
    "SourceError",
    "EmptyOrSingletonError",
    "NonPositiveEntryError",
    "DimensionMismatchError",
    "UniformBaseError",
    "IllConditionedError",
    "ParameterError",
    "OutOfRangeError",
    "OrderAtOneError",
    "OutOfEntropyRangeError",
    "ModeUnavailableError",
    "OutOfRegimeError",
    "EqualEntropyError",
    "EntropyOrderError",
    "InfeasibleBudgetError",
    "ResourceGuardError",
    "TooManyClassesError",
    "TooLargeError",
    "WitnessNotFoundError",
    "SecInconsistencyError",
    "ConfigError",
    "OutputError",
]

"""
Exception hierarchy for guesswork-budget.

Every failure raised by the library derives from GuessworkError and carries a
short message plus optional actionable details, so the CLI can print both and
map the class to an exit code.
"""

from __future__ import annotations

from typing import Optional


class GuessworkError(Exception):
    """Base exception for all guesswork-budget failures."""

    def __init__(self, message: str, details: Optional[str] = None) -> None:
        super().__init__(message)
        self.message = message
        self.details = details


class SourceError(GuessworkError):
    """Raised when a probability vector is not an admissible source."""


class EmptyOrSingletonError(SourceError):
    """Raised when a source has fewer than two symbols."""


class NonPositiveEntryError(SourceError):
    """Raised when an entry falls below the construction floor (boundary of the simplex)."""


class DimensionMismatchError(SourceError):
    """Raised when two sources live on alphabets of different sizes."""


class UniformBaseError(SourceError):
    """Raised when an operation needs a non-uniform source but got the uniform one."""


class IllConditionedError(SourceError):
    """Raised when a source is too close to the boundary for finite differences."""


class ParameterError(GuessworkError):
    """Raised when a numeric parameter is outside the domain of an operation."""


class OutOfRangeError(ParameterError):
    """Raised when a scalar parameter is outside its admissible interval."""


class OrderAtOneError(ParameterError):
    """Raised when a Renyi order sits on the removable singularity at 1."""


class OutOfEntropyRangeError(ParameterError):
    """Raised when a target entropy is not attainable inside a tilted family."""


class ModeUnavailableError(ParameterError):
    """Raised when a guesswork moment mode cannot be used for a profile."""


class OutOfRegimeError(ParameterError):
    """Raised when a comparison is requested outside the regime its statement covers."""


class EqualEntropyError(ParameterError):
    """Raised when two sources have the same entropy, so the entropy ratio degenerates."""


class EntropyOrderError(ParameterError):
    """Raised when sources are passed in the wrong entropy order without auto-ordering."""


class InfeasibleBudgetError(ParameterError):
    """Raised when a per-character entropy budget exceeds what the alphabet allows."""


class ResourceGuardError(GuessworkError):
    """Raised when a computation would exceed a configured resource cap."""


class TooManyClassesError(ResourceGuardError):
    """Raised when a type-class decomposition would have too many compositions."""


class TooLargeError(ResourceGuardError):
    """Raised when explicit enumeration or a scan would exceed its cap."""


class WitnessNotFoundError(GuessworkError):
    """Raised when no grid value produces an SEC-failing construction."""


class SecInconsistencyError(GuessworkError):
    """Raised when a certified source fails the SEC, which signals numeric trouble."""


class ConfigError(GuessworkError):
    """Raised when runtime configuration (environment, options) is invalid."""


class OutputError(GuessworkError):
    """Raised when a result file or source file cannot be read or written."""

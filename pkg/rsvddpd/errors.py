"""Exceptions and warning categories for rsvddpd.

Every exception carries the process exit code the CLI maps it to:

- 2: unreadable or inconsistent input (`FormatError`, `DegenerateInputError`)
- 3: numerical failure (`RankDeficiencyError`, `ConvergenceError`)
- 4: contract misuse (`ContractError`, `ConfigError`, `DomainError`)

Recoverable numerical events inside the estimator are reported through the
warning categories below, never by raising.
"""
from __future__ import annotations

EXIT_OK = 0
EXIT_FORMAT = 2
EXIT_NUMERICAL = 3
EXIT_CONTRACT = 4


class RsvdError(Exception):
    """Base class for all rsvddpd errors."""
    exit_code: int = EXIT_CONTRACT


class FormatError(RsvdError, ValueError):
    """Input file or frame sequence is malformed or inconsistent."""
    exit_code = EXIT_FORMAT


class DegenerateInputError(RsvdError, ValueError):
    """Input matrix is identically zero (nothing to decompose)."""
    exit_code = EXIT_FORMAT


class DomainError(RsvdError, ValueError):
    """Argument lies outside a function's mathematical domain."""
    exit_code = EXIT_CONTRACT


class ContractError(RsvdError, ValueError):
    """Caller violated a precondition (shapes, ranks, grids)."""
    exit_code = EXIT_CONTRACT


class ConfigError(ContractError):
    """Invalid configuration value."""


class RankDeficiencyError(RsvdError, ArithmeticError):
    """A candidate vector lies in the span of the already-extracted basis."""
    exit_code = EXIT_NUMERICAL


class ConvergenceError(RsvdError, ArithmeticError):
    """Raised by the CLI when a fit finished without converging."""
    exit_code = EXIT_NUMERICAL


class RsvdWarning(UserWarning):
    """Base class for rsvddpd warnings."""


class DegenerateRowWarning(RsvdWarning):
    """A weighted regression denominator vanished; the previous coefficient was kept."""


class RankTruncationWarning(RsvdWarning):
    """Decomposition stopped before the requested rank."""


class NonConvergenceWarning(RsvdWarning):
    """A rank-one fit hit max_iter before meeting the tolerance."""


class BreakdownWarning(RsvdWarning):
    """Nearly every cell was down-weighted; the previous scale estimate was kept."""

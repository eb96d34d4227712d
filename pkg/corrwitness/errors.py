"""Exception hierarchy shared by every corrwitness module."""


class CorrWitnessError(Exception):
    """Root of all errors raised by corrwitness."""


class InvalidInputError(CorrWitnessError, ValueError):
    """Shape, dimension, Hermiticity or range violation in an input value."""


class NotPositiveSemidefiniteError(InvalidInputError):
    """An eigenvalue lies below the clamping tolerance."""


class OracleLimitError(InvalidInputError):
    """The brute-force oracle was asked for a system it cannot hold in memory."""


class TruncationError(CorrWitnessError):
    """A truncated Fock space did not converge at the largest allowed cutoff."""


class ConsistencyError(CorrWitnessError):
    """An internal invariant broke (e.g. a closed-form reduced state is not PSD)."""


class UsageError(CorrWitnessError):
    """Bad command-line flags or configuration values."""

"""Exception taxonomy shared across modules (mapped to CLI exit codes)."""


class KperecError(Exception):
    """Base class for library errors."""


class InputError(KperecError):
    """Malformed or inconsistent user input (CLI exit code 1)."""


class EpsTooCoarseError(InputError):
    """The requested epsilon cannot separate the certified quantities."""


class BudgetExceededError(KperecError):
    """A configured resource cap was hit (CLI exit code 2)."""


class InvariantViolationError(KperecError):
    """A checked mathematical invariant failed (CLI exit code 3)."""

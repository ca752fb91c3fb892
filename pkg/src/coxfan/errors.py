"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: input problems exit 2, violated
preconditions exit 3, internal invariant breaches exit 4.
"""


class ToricInputError(ValueError):
    """Raised for malformed or inconsistent input data."""


class PreconditionError(ValueError):
    """Raised when an operation's stated precondition does not hold."""


class InternalInvariantError(RuntimeError):
    """Raised when a computation violates an invariant it must maintain."""

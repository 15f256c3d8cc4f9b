"""Exception types shared across rigikit."""


class RigikitError(Exception):
    """Base class for all library errors."""


class InputError(RigikitError, ValueError):
    """Malformed input or a violated precondition."""


class GraphFormatError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateError(InputError):
    """The input is in a degenerate position the operation does not handle."""


class NoStressError(InputError):
    """The edge set is independent, so there is no non-zero equilibrium stress."""


class InvariantFault(RigikitError, RuntimeError):
    """An internal invariant failed. This indicates a bug or a false theorem."""

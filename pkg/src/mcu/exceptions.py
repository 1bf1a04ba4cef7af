"""Exception types raised across the package.

All of them derive from ``ValueError`` so callers that only care about
"bad input" can catch a single type.
"""


class InputError(ValueError):
    """Malformed or inconsistent arguments (lengths, ranges, NaNs)."""


class MoveError(ValueError):
    """A node move that would not keep the decomposition feasible."""


class SizeError(ValueError):
    """Instance too large for an exhaustive routine."""


class UnsupportedPriorError(ValueError):
    """Requested computation only defined for the unbiased prior."""


class EvaluationError(ValueError):
    """Not enough evaluable nodes to compute a clustering metric."""


class ParseError(InputError):
    """Malformed instance/partition file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line

"""Exception types shared across the package.

The CLI maps these onto its exit-code contract (1 = I/O or parse,
2 = usage, 3 = resource), so library code should raise the most
specific type that applies.
"""


class ParseError(ValueError):
    """Malformed edge-list input. Carries the 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ResourceLimitError(RuntimeError):
    """A configured size cap (node count, dense-operator cap) was exceeded."""


class AmbiguousStationaryError(ValueError):
    """The eigenvalue-1 eigenspace is degenerate; no unique stationary vector.

    ``dimension`` is the (numerically detected) eigenspace dimension.
    """

    def __init__(self, dimension):
        super().__init__(
            f"stationary vector is not unique: eigenvalue-1 eigenspace has "
            f"dimension {dimension}"
        )
        self.dimension = dimension

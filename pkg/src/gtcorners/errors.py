"""Exception hierarchy.

Validation problems derive from ``ValueError`` so callers can catch them the
usual way; numerical and budget failures are kept separate because the CLI
maps them to a different exit code.
"""


class DimensionError(ValueError):
    """Tuple or matrix sizes are incompatible."""


class DegenerateSpectrumError(ValueError):
    """A strictly increasing (or pairwise distinct) tuple has ties."""


class ConditioningError(ArithmeticError):
    """Knots are clustered so tightly that the closed forms lose all accuracy."""


class ResourceError(RuntimeError):
    """A quadrature or dynamic-programming budget would be exceeded."""


class RangeError(OverflowError):
    """Exponentials overflow double precision; rescale the inputs."""


class VerificationError(AssertionError):
    """A verification suite reported at least one failing check."""

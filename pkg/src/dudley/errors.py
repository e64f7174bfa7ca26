"""Exception types shared across the package.

The CLI maps these onto exit codes: usage problems exit 1, violated
preconditions exit 2, geometric failures exit 3.
"""


class DudleyError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(DudleyError, ValueError):
    """Operands live in different ambient dimensions."""


class GeometryError(DudleyError):
    """A geometric computation failed (degenerate input, no solution)."""


class UnboundedError(GeometryError):
    """A polytope or LP is unbounded where a bounded one is required."""


class InfeasibleError(GeometryError):
    """A constraint system has no solution."""


class LPError(DudleyError):
    """The simplex solver failed to make progress (numerical breakdown)."""


class PackingError(DudleyError):
    """Sphere packing construction or certification failed."""


class ProjectionError(DudleyError):
    """Nearest-point computation failed."""


class SandwichError(DudleyError):
    """Body violates the inradius/circumradius hypothesis of exact mode."""


class FormatError(DudleyError, ValueError):
    """A serialized artifact is malformed or has inconsistent fields."""

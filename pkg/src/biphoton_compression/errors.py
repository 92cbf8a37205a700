"""Exception hierarchy.

The CLI maps these onto exit codes: ``UsageError``/``DomainError`` raised
while loading a config are configuration problems (exit 1); everything
deriving from ``PhysicsError`` is a numerical or degeneracy failure (exit 2).
"""


class BiphotonError(Exception):
    """Base class for all library errors."""


class DomainError(BiphotonError, ValueError):
    """An input lies outside the domain of an operation."""


class UsageError(BiphotonError, ValueError):
    """An operation was called on an object in the wrong state (e.g. domain tag)."""


class PhysicsError(BiphotonError, ArithmeticError):
    """Base for failures of the physics or numerics themselves."""


class NumericError(PhysicsError):
    """Singular or non-normalizable intermediate quantity."""


class DegeneracyError(PhysicsError):
    """The dispersion optimum is not unique (flat or concave direction)."""


class ResolutionError(PhysicsError):
    """The sampling grid is too coarse or too small for the requested state.

    ``suggestion`` carries a human-readable hint (usually a larger ``n`` or
    ``extent_sigmas``).
    """

    def __init__(self, message, suggestion=None):
        super().__init__(message if suggestion is None else f"{message} ({suggestion})")
        self.suggestion = suggestion


class NoDipError(PhysicsError):
    """A HOM curve without a resolvable dip."""

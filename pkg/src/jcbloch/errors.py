"""Exception types shared across the package."""


class JCBlochError(Exception):
    """Base class for all package-specific errors."""


class TruncationOverflow(JCBlochError):
    """The thermal series needs more terms than the configured cap allows."""


class NormalizationError(JCBlochError):
    """An operation that requires g = omega = 1 was called with other values."""


class DomainError(JCBlochError):
    """Argument outside the mathematical domain of the operation."""


class PrecisionError(JCBlochError):
    """The precision budget cannot certify the requested error bound."""


class DegenerateStep(JCBlochError):
    """A sampling step resonates with 2*pi and breaks equidistribution."""


class BoundsViolation(JCBlochError):
    """A scale factor lies outside the admissible rescaling window."""


class TruncationTooSmall(JCBlochError):
    """The Fock-space cutoff leaves too much thermal population above it."""


class ConfigError(JCBlochError):
    """Invalid run configuration (bad field value or inconsistent options)."""

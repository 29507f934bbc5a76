"""Exception and warning types shared across the toolkit.

Every error raised by the package derives from :class:`ToolkitError`, so
callers can catch one base class at the boundary.  Configuration problems
additionally derive from :class:`ConfigError` and carry enough structure
(field path, position) for the command line to print actionable messages.
"""

from __future__ import annotations

__all__ = [
    "ToolkitError",
    "GridRangeError",
    "GridSizeError",
    "GridMismatchError",
    "DimensionMismatchError",
    "NonpositiveWidthError",
    "SchemeBoundaryError",
    "HermitianInputError",
    "NotNormalizedError",
    "ConfigError",
    "ConfigParseError",
    "ConfigValidationError",
    "UnknownParameterError",
    "NormalizationWarning",
    "BoundaryAmplitudeWarning",
]


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""


class GridRangeError(ToolkitError, ValueError):
    """Grid endpoints are invalid (x_min >= x_max, or not finite)."""


class GridSizeError(ToolkitError, ValueError):
    """Grid has too few points to support the requested construction."""


class GridMismatchError(ToolkitError, ValueError):
    """Two objects built on different grids were combined."""


class DimensionMismatchError(ToolkitError, ValueError):
    """Array dimensions do not agree with the grid or with each other."""


class NonpositiveWidthError(ToolkitError, ValueError):
    """A width or scale parameter that must be positive was not."""


class SchemeBoundaryError(ToolkitError, ValueError):
    """The derivative scheme is incompatible with the grid boundary type."""


class HermitianInputError(ToolkitError, ValueError):
    """An operator required to be Hermitian failed the Hermiticity test."""


class NotNormalizedError(ToolkitError, ValueError):
    """A report entry point required a normalized state and did not get one."""


class ConfigError(ToolkitError, ValueError):
    """Base class for configuration loading and validation problems."""


class ConfigParseError(ConfigError):
    """Configuration text is not valid JSON; message carries the position."""


class ConfigValidationError(ConfigError):
    """A configuration field is missing, unknown, or out of range.

    Parameters
    ----------
    path : str
        Dotted path of the offending field, e.g. ``"grid.n"``.
    reason : str
        Human-readable reason, e.g. ``"must be >= 8"``.
    """

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class UnknownParameterError(ConfigError):
    """A sweep targeted a parameter path that does not exist."""

    def __init__(self, path: str):
        self.path = path
        super().__init__(f"unknown parameter path: {path!r}")


class NormalizationWarning(UserWarning):
    """A state expected to be normalized was not; values still returned."""


class BoundaryAmplitudeWarning(UserWarning):
    """A wave packet has non-negligible amplitude at the grid boundary."""

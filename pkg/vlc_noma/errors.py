"""
Exception hierarchy for the VLC NOMA simulator.
"""

from typing import Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from .constellation import ValidationReport


class VlcNomaError(Exception):
    """Base class for every error raised by the library."""


class DomainError(VlcNomaError, ValueError):
    """A numeric argument lies outside the domain of an operation."""


class ConfigError(VlcNomaError, ValueError):
    """Configuration is malformed, inconsistent or incomplete."""


class CapacityError(VlcNomaError):
    """A requested enumeration exceeds the configured guard limit."""


class ValidationError(VlcNomaError):
    """A constellation failed the SIC ordering or zero-BER conditions."""

    def __init__(self, message: str, report: Optional["ValidationReport"] = None):
        super().__init__(message)
        self.report = report

"""Exception hierarchy shared by the library and mapped to CLI exit codes."""


class BergmanError(Exception):
    """Base class for all library errors."""


class DiskDomainError(BergmanError, ValueError):
    """A point lies on or outside the guarded unit disk."""


class QuadratureError(BergmanError):
    """A quadrature rule is not exact enough, or failed to converge, for the request."""


class FeasibilityError(BergmanError):
    """The truncation degree cannot represent the request (kernel tail mass too large)."""


class ConfigError(BergmanError, ValueError):
    """Invalid user configuration (CLI flags, JSON expressions, presets)."""

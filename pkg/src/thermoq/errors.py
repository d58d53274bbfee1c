"""Exception types shared across the package."""


class ThermoqError(Exception):
    """Base class for package-specific failures."""


class ValidationError(ThermoqError, ValueError):
    """Invalid parameter, state, or configuration value (CLI exit code 2)."""


class DegenerateGeneratorError(ThermoqError):
    """Stationary solve failed: the generator's null space is not clean
    one-dimensional, or an independent cross-check disagreed (CLI exit code 3)."""


class SearchError(ThermoqError):
    """A root- or optimum-search found no valid interior solution (CLI exit code 4)."""

"""Exception types shared across the package."""


class LevelDotError(Exception):
    """Base class for all package errors."""


class ConfigError(LevelDotError):
    """Invalid ensemble or experiment configuration."""


class AssemblyError(LevelDotError):
    """Block dimensions inconsistent with the requested symmetry class."""


class RealizationError(LevelDotError):
    """A sampled realization failed a numerical quality gate."""


class QuadratureError(LevelDotError):
    """Adaptive integration did not converge.

    Carries the best estimate obtained so far in ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class ComparisonError(LevelDotError):
    """Curve comparison could not be carried out (e.g. grid mismatch)."""

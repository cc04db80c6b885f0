"""Exception types raised across the navigation stack."""

from __future__ import annotations


class HPFNavError(Exception):
    """Base class for all package errors."""


class ConfigurationError(HPFNavError, ValueError):
    pass


class InvalidTargetError(HPFNavError, ValueError):
    """The requested target cell is not a free cell of the grid."""


class NonConvergenceError(HPFNavError, RuntimeError):
    """Relaxation hit its sweep budget before reaching tolerance."""

    def __init__(self, message: str, last_residual: float, iterations: int):
        super().__init__(message)
        self.last_residual = last_residual
        self.iterations = iterations


class SingularActuationError(HPFNavError, ValueError):
    """A car-like vehicle was asked to turn without moving."""


class InvalidScenarioError(HPFNavError, ValueError):
    """The scenario cannot be run (bad geometry, blocked target, ...)."""


class ScenarioParseError(HPFNavError, ValueError):
    """The scenario file could not be parsed or failed schema checks."""

"""Exception types shared across the package."""

from __future__ import annotations

import numpy as np


class OscTrackError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(OscTrackError, ValueError):
    """Invalid arguments or configuration supplied by the caller."""


class DimensionMismatchError(UsageError):
    """Arrays whose shapes do not fit the declared system dimensions."""


class DomainError(OscTrackError):
    """A state left the open domain on which the vector fields are defined."""


class RankConditionError(OscTrackError):
    """The bracket-extended gain matrix is singular at some state.

    Carries the offending state (and the time it was reached, when known)
    so callers can report where the scheme degenerates.
    """

    def __init__(self, message: str, state: np.ndarray | None = None,
                 time: float | None = None):
        super().__init__(message)
        self.state = state
        self.time = time


class UnsupportedSchemeError(OscTrackError):
    """A bracket structure outside what the control synthesis covers."""


class DegenerateCurveError(OscTrackError):
    """A reference curve violates a prerequisite of the construction.

    Typical case: the planar speed vanishes somewhere, so no heading
    angle can be attached to the path.
    """


class SimulationError(OscTrackError):
    """Numerical integration had to abort before the horizon.

    Attributes
    ----------
    reason : str
        Machine-readable cause, e.g. ``"domain-exit"`` or
        ``"non-finite-state"``.
    time : float
        Time at which integration stopped.
    partial : Trajectory or None
        Whatever prefix of the trajectory was completed, for diagnosis.
    """

    def __init__(self, message: str, reason: str, time: float, partial=None):
        super().__init__(message)
        self.reason = reason
        self.time = time
        self.partial = partial


class CertificationError(OscTrackError):
    """Bound estimation could not produce usable constants."""

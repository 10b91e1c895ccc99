"""Exception types shared across the solver suite."""


class SolverError(Exception):
    """Base class for failures raised by the integration and shooting layers."""


class StepUnderflowError(SolverError):
    """The step controller needed a step below the minimum allowed size.

    Carries the partial trajectory accumulated so far in ``trajectory`` so
    callers can inspect where the integration ground to a halt.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class GuardTrippedError(SolverError):
    """The singular guard flagged the initial state; integration never started."""


class OutOfSpanError(SolverError):
    """A dense-output evaluation point lies outside the integrated span."""


class NoBracketError(SolverError):
    """The shooting bracket endpoints classify on the same side of the target."""


class PositivityLostError(SolverError):
    """A profile required to stay positive hit zero inside the span."""


class MatchFailureError(SolverError):
    """A matching condition (boundary value or amplitude) missed its tolerance."""


class WindowTooShortError(SolverError):
    """A fit window contains too few points to determine the fit."""


class NonPositiveValuesError(SolverError):
    """A log-scale fit window contains non-positive profile values."""


class CoverageGapError(SolverError):
    """An evaluation point falls outside the data carried by the profile."""


class MissingTailFitError(SolverError):
    """The operation needs a fitted tail but the profile does not carry one."""


class ZeroDenominatorError(SolverError):
    """A pointwise functional divides by a profile value that is zero."""


class ConfigError(Exception):
    """Base class for configuration file and option errors."""


class UnknownKeyError(ConfigError):
    """The configuration contains a key that no option matches."""


class OutOfRangeError(ConfigError):
    """A configuration value violates its documented range."""

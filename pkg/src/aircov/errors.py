"""Exception hierarchy shared by all aircov modules.

The CLI maps these onto its exit-code contract: scenario errors exit 1,
computation errors exit 2, pair-validation failures exit 3.
"""


class AircovError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(AircovError, ValueError):
    """An argument violates a documented precondition."""


class BelowConeError(AircovError, ValueError):
    """The cut plane lies below the cone apex; the minimum-range formula
    does not apply there (use the conic-section machinery instead)."""


class NotFoundError(AircovError, KeyError):
    """A referenced cell, pair or group id does not exist."""


class CannotAttachError(AircovError, RuntimeError):
    """No audible cell at the start of a flight."""


class UnmeasurableError(AircovError, RuntimeError):
    """A pattern has no -3 dB crossing within the scanned window."""


class ScenarioError(AircovError, ValueError):
    """A scenario file failed to parse or validate."""


class ScenarioSyntaxError(ScenarioError):
    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class ScenarioSemanticError(ScenarioError):
    """Carries the JSON path of the offending key, e.g.
    ``groups[0].pairs[1].aerial_coverage_cell``."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path

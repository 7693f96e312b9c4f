"""Exception types shared across the lab."""


class QuiverError(Exception):
    """Base class for all lab errors."""


# --- point model ---

class NotWritable(QuiverError):
    pass


class InvalidLevel(QuiverError):
    pass


class NonMonotonicTimestamp(QuiverError):
    pass


class EmptyRange(QuiverError):
    pass


# --- simulator ---

class ControllerRejected(QuiverError):
    """The embedded VAV controller refused a write (e.g. heating lockout)."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


# --- safety framework ---

class PointBusy(QuiverError):
    pass


class SessionNotActive(QuiverError):
    pass


class UnknownPoint(QuiverError):
    pass


# --- signal features ---

class EmptySeries(QuiverError):
    pass


class LengthMismatch(QuiverError):
    pass


class SeriesTooShort(QuiverError):
    pass


# --- pipelines ---

class OutOfRange(QuiverError):
    pass


class DwellTooShort(QuiverError):
    pass


class InsufficientWindow(QuiverError):
    pass


class PlanAborted(QuiverError):
    """A perturbation plan hit a rejected write; the session was rolled back."""


class DegenerateData(QuiverError):
    pass


class EmptyAssignment(QuiverError):
    pass


class MissingProbe(QuiverError):
    pass


class CannotClamp(QuiverError):
    pass


class NodeSetMismatch(QuiverError):
    pass


# --- scenarios / CLI ---

class ConfigError(QuiverError):
    pass


class MissingArtifact(QuiverError):
    pass

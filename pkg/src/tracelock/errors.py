"""Shared exception types."""


class TraceLockError(Exception):
    """Base class for all tracelock errors."""


class ValidationError(TraceLockError):
    """Input failed a structural or range check."""


class MacValidationError(ValidationError):
    """Bluetooth MAC address is syntactically invalid."""


class DuplicateMacError(TraceLockError):
    """Registration attempted with a MAC that is already registered."""


class UnknownUserError(TraceLockError):
    """Operation referenced an unregistered user id."""


class UnknownRegionError(TraceLockError):
    """Operation referenced a region id that is not configured."""


class OutOfOrderFixError(TraceLockError):
    """A position fix arrived with a wall time earlier than the user's last fix."""


class DuplicateFixError(TraceLockError):
    """A position fix mapped onto a tick the user already has a fix for."""


class InfeasibleScenarioError(TraceLockError):
    """Scenario constraints cannot be satisfied (bbox too small, agents too close)."""


class TransportError(TraceLockError):
    """A remote service could not be reached or a request failed mid-run."""


class StartupError(TraceLockError):
    """Service could not start (bad data directory, port in use)."""

"""Exception types shared across the package."""


class DoublesimError(Exception):
    """Base class for all package errors."""


class ValidationError(DoublesimError):
    """A config or value violates its declared invariants."""


class ConfigurationError(DoublesimError):
    """A run/battle was set up with inconsistent options."""


class StateError(DoublesimError):
    """An operation was applied to a state in the wrong phase."""


class IllegalActionError(DoublesimError):
    """An action failed the legality mask."""

    def __init__(self, message, slot_index=None):
        super().__init__(message)
        self.slot_index = slot_index


class DataError(DoublesimError):
    """A dataset record is inconsistent (e.g. illegal obs/action pair)."""


class ArchitectureError(DoublesimError):
    """Parameter vector or observation does not match the descriptor."""


class CheckpointError(DoublesimError):
    """Checkpoint payload is corrupt or from a mismatched build."""


class SolverError(DoublesimError):
    """A meta-game solver failed to reach its certificate."""


class ProtocolError(DoublesimError):
    """Evaluation-protocol team-set constraint violated."""


class LogParseError(DoublesimError):
    """Battle-log text violates the grammar."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class ReconstructionError(DoublesimError):
    """A parsed log implies a transition the engine cannot replay."""

    def __init__(self, message, event_index=None):
        super().__init__(message)
        self.event_index = event_index

"""Exception types shared across the debugger."""


class SwitchboardError(Exception):
    """Base class for all debugger errors."""


class ProtocolError(SwitchboardError):
    """Malformed or out-of-contract wire frame."""


class UnknownItemError(SwitchboardError):
    """A message/timeout/history reference that does not exist (stale or bogus)."""


class DuplicateIdError(SwitchboardError):
    """An id that was supposed to be fresh is already in use."""


class ShimError(SwitchboardError):
    """A node connection failed or misbehaved."""


class DeterminismError(SwitchboardError):
    """Replay produced a state different from the recorded one."""

    def __init__(self, history_id, message):
        super().__init__(message)
        self.history_id = history_id


class TraceError(SwitchboardError):
    """A trace file is malformed or does not match the running system."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step

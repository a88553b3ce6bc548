"""Interactive debugger for message-passing distributed systems.

Intercepts every message and timeout of a system under test, lets you pick
the delivery order (or drop and duplicate messages), and supports time
travel across a branching execution history via deterministic replay.
"""

from .engine import Session, start_session
from .errors import (DeterminismError, DuplicateIdError, ProtocolError,
                     ShimError, SwitchboardError, TraceError, UnknownItemError)
from .model import (DeliverMessage, DeliverTimeout, DropMessage,
                    DuplicateMessage, Envelope, HandlerResponse, HistoryTree,
                    Inbox, Start, SystemSnapshot, TimeoutEntry)
from .shim import HandlerContext, Node, NodeRuntime, run_node
from .spacetime import to_dot
from .tracefile import Trace, explore, load_trace, write_trace
from .transport import FrameLog, LoopbackHandle, NodeServer, loopback_handles

__all__ = [
    "DeliverMessage", "DeliverTimeout", "DeterminismError", "DropMessage",
    "DuplicateIdError", "DuplicateMessage", "Envelope", "FrameLog",
    "HandlerContext", "HandlerResponse", "HistoryTree", "Inbox",
    "LoopbackHandle", "Node", "NodeRuntime", "NodeServer", "ProtocolError",
    "Session", "ShimError", "Start", "SwitchboardError", "SystemSnapshot",
    "TimeoutEntry", "Trace", "TraceError", "UnknownItemError", "explore",
    "load_trace", "loopback_handles", "run_node", "start_session", "to_dot",
    "write_trace",
]

__version__ = "0.1.0"

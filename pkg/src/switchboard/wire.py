"""Frame codec for the node-facing shim protocol and the frontend channel.

Every frame is one line of canonical JSON (sorted keys, no extra
whitespace) terminated by a newline. Frames are plain dicts; this module
validates their shape at the boundary so nothing malformed gets further in.
See docs/protocol.md for the byte-level grammar.
"""

from . import canon
from .errors import ProtocolError
from .model import HandlerResponse

NODE_PORT = 4343
UI_PORT = 8080


def _text(frame, key):
    v = frame.get(key)
    if not isinstance(v, str):
        raise ProtocolError(f"field {key!r} must be text, got {v!r}")
    return v


def _value(frame, key):
    if key not in frame:
        raise ProtocolError(f"missing field {key!r}")
    try:
        canon.check_value(frame[key])
    except ValueError as e:
        raise ProtocolError(f"field {key!r}: {e}") from None
    return frame[key]


def _check_register(frame):
    name = _text(frame, "name")
    if not name:
        raise ProtocolError("register name must be non-empty")
    return {"msgtype": "register", "name": name}


def _check_start(frame):
    return {"msgtype": "start"}


def _check_timeout(frame):
    return {"msgtype": "timeout", "type": _text(frame, "type"),
            "body": _value(frame, "body")}


def _check_message(frame):
    return {"msgtype": "message", "from": _text(frame, "from"),
            "type": _text(frame, "type"), "body": _value(frame, "body")}


def _check_response(frame):
    state = _value(frame, "state")
    messages = frame.get("messages")
    timeouts = frame.get("timeouts")
    cleared = frame.get("cleared")
    for key, lst in (("messages", messages), ("timeouts", timeouts), ("cleared", cleared)):
        if not isinstance(lst, list):
            raise ProtocolError(f"field {key!r} must be a list")
    out_msgs = []
    for m in messages:
        if not isinstance(m, dict):
            raise ProtocolError("messages entries must be objects")
        out_msgs.append({"to": _text(m, "to"), "type": _text(m, "type"),
                         "body": _value(m, "body")})
    def _timeout_list(lst, key):
        out = []
        for t in lst:
            if not isinstance(t, dict):
                raise ProtocolError(f"{key} entries must be objects")
            out.append({"type": _text(t, "type"), "body": _value(t, "body")})
        return out
    return {"msgtype": "response", "state": state, "messages": out_msgs,
            "timeouts": _timeout_list(timeouts, "timeouts"),
            "cleared": _timeout_list(cleared, "cleared")}


_checkers = {
    "register": _check_register,
    "start": _check_start,
    "timeout": _check_timeout,
    "message": _check_message,
    "response": _check_response,
}


def check_frame(frame):
    """Validate a frame dict; returns a copy with only the known fields."""
    if not isinstance(frame, dict):
        raise ProtocolError(f"frame must be an object, got {type(frame).__name__}")
    msgtype = frame.get("msgtype")
    checker = _checkers.get(msgtype)
    if checker is None:
        raise ProtocolError(f"unknown msgtype {msgtype!r}")
    return checker(frame)


def encode_frame(frame):
    """Canonical bytes for one frame: sorted keys, single trailing newline."""
    checked = check_frame(frame)  # _value already walked every payload
    return canon.dump_bytes_trusted(checked) + b"\n"


def decode_frame(line):
    """Parse one newline-terminated line into a frame dict.

    Unknown fields are dropped (forward compatibility); an unknown msgtype
    or a missing/ill-typed required field raises ProtocolError.
    """
    if isinstance(line, (bytes, bytearray)):
        line = line.decode("utf-8", errors="replace")
    line = line.rstrip("\n").rstrip("\r")
    try:
        obj = canon.loads(line)
    except ValueError as e:
        raise ProtocolError(f"malformed frame: {e}") from None
    return check_frame(obj)


# -- Conversions between frames and model types -------------------------

def response_frame(state, messages=(), timeouts=(), cleared=()):
    return {"msgtype": "response", "state": state,
            "messages": [{"to": to, "type": t, "body": b} for (to, t, b) in messages],
            "timeouts": [{"type": t, "body": b} for (t, b) in timeouts],
            "cleared": [{"type": t, "body": b} for (t, b) in cleared]}


def response_from_frame(frame):
    if frame.get("msgtype") != "response":
        raise ProtocolError(f"expected a response frame, got {frame.get('msgtype')!r}")
    return HandlerResponse(
        state=frame["state"],
        messages=tuple((m["to"], m["type"], m["body"]) for m in frame["messages"]),
        timeouts_set=tuple((t["type"], t["body"]) for t in frame["timeouts"]),
        timeouts_cleared=tuple((t["type"], t["body"]) for t in frame["cleared"]))


def start_frame():
    return {"msgtype": "start"}


def timeout_frame(timeout):
    return {"msgtype": "timeout", "type": timeout.type, "body": timeout.body}


def message_frame(envelope):
    return {"msgtype": "message", "from": envelope.sender,
            "type": envelope.type, "body": envelope.body}

"""Server-side node endpoint and the shim handles the engine dispatches to.

A handle is anything with .name and .call(frame) -> response frame; the
engine holds one per node. TcpShimHandle fronts a live socket from a real
shim; LoopbackHandle runs a NodeRuntime in-process but still pushes every
frame through the byte codec, so tests exercise exactly the wire behavior.
"""

import socket
import threading

from . import wire
from .errors import ProtocolError, ShimError
from .shim import NodeRuntime


class FrameLog:
    """Ordered record of every frame crossing the server boundary."""

    def __init__(self):
        self._lines = []
        self._lock = threading.Lock()

    def record(self, direction, node, raw):
        if isinstance(raw, (bytes, bytearray)):
            raw = raw.decode("utf-8")
        with self._lock:
            self._lines.append(f"{direction} {node} {raw.rstrip()}")

    def text(self):
        with self._lock:
            return "\n".join(self._lines) + ("\n" if self._lines else "")


class LoopbackHandle:
    """In-process shim: same frames, same bytes, no socket."""

    def __init__(self, node, frame_log=None):
        self.name = node.name
        self._runtime = NodeRuntime(node)
        self._log = frame_log
        if self._log:
            register = wire.encode_frame({"msgtype": "register", "name": node.name})
            self._log.record("<-", self.name, register)

    def call(self, frame):
        raw = wire.encode_frame(frame)
        if self._log:
            self._log.record("->", self.name, raw)
        try:
            response_raw = self._runtime.handle_line(raw)
        except ProtocolError:
            raise
        except Exception as e:
            raise ShimError(f"node {self.name} handler failed: {e}") from e
        if self._log:
            self._log.record("<-", self.name, response_raw)
        return wire.decode_frame(response_raw)

    def close(self):
        pass


class TcpShimHandle:
    """One registered node connection; request/response in strict lockstep."""

    def __init__(self, name, sock, frame_log=None, reader=None):
        self.name = name
        self._sock = sock
        self._reader = reader if reader is not None else sock.makefile("rb")
        self._log = frame_log
        self._lock = threading.Lock()

    def call(self, frame):
        raw = wire.encode_frame(frame)
        with self._lock:
            if self._log:
                self._log.record("->", self.name, raw)
            try:
                self._sock.sendall(raw)
                line = self._reader.readline()
            except OSError as e:
                raise ShimError(f"node {self.name} connection failed: {e}") from e
            if not line:
                raise ShimError(
                    f"node {self.name} closed its connection mid-exchange")
            if self._log:
                self._log.record("<-", self.name, line)
        response = wire.decode_frame(line)
        if response["msgtype"] != "response":
            raise ProtocolError(
                f"node {self.name} sent {response['msgtype']!r}, expected response")
        return response

    def close(self):
        try:
            self._sock.close()
        except OSError:
            pass


def loopback_handles(nodes, frame_log=None):
    """Handles for running fixture nodes in-process, keyed by name."""
    handles = {}
    for node in nodes:
        if node.name in handles:
            raise ShimError(f"duplicate node name {node.name!r}")
        handles[node.name] = LoopbackHandle(node, frame_log)
    return handles


class NodeServer:
    """Listens on the node port and turns register frames into shim handles."""

    def __init__(self, host="127.0.0.1", port=wire.NODE_PORT, frame_log=None):
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, port))
        self._sock.listen(16)
        self.port = self._sock.getsockname()[1]
        self._log = frame_log
        self._handles = {}
        self._lock = threading.Lock()
        self._registered = threading.Condition(self._lock)
        self._closed = False
        self._thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._thread.start()

    def _accept_loop(self):
        while True:
            try:
                conn, _ = self._sock.accept()
            except OSError:
                return  # server closed
            threading.Thread(target=self._register, args=(conn,), daemon=True).start()

    def _register(self, conn):
        """First frame must be register; duplicate names get the door closed."""
        try:
            reader = conn.makefile("rb")
            line = reader.readline()
            frame = wire.decode_frame(line)
            if frame["msgtype"] != "register":
                raise ProtocolError(
                    f"first frame must be register, got {frame['msgtype']!r}")
            name = frame["name"]
            with self._lock:
                if name in self._handles:
                    raise ProtocolError(f"duplicate node name {name!r}")
                if self._log:
                    self._log.record("<-", name, line)
                self._handles[name] = TcpShimHandle(name, conn, self._log, reader)
                self._registered.notify_all()
        except (ProtocolError, OSError):
            try:
                conn.close()
            except OSError:
                pass

    def wait_for(self, names, timeout=10.0):
        """Block until all expected nodes registered; returns their handles."""
        names = set(names)
        with self._lock:
            ok = self._registered.wait_for(
                lambda: names <= set(self._handles), timeout=timeout)
            if not ok:
                missing = sorted(names - set(self._handles))
                raise ShimError(f"nodes never registered: {', '.join(missing)}")
            return {n: self._handles[n] for n in sorted(names)}

    def handles(self):
        with self._lock:
            return dict(self._handles)

    def close(self):
        with self._lock:
            if self._closed:
                return
            self._closed = True
        self._sock.close()
        for handle in self.handles().values():
            handle.close()

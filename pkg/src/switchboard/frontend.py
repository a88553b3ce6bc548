"""Frontend endpoint: static UI assets plus the update/command channel.

One port serves both: plain GETs return the bundled browser app, and a
WebSocket upgrade turns the connection into the push channel. The server
is authoritative; the browser only renders the last update it received.
Every applied event or reset produces one update per connection, pushed by
a per-connection writer thread so a stalled client never blocks the engine
or the other connections.
"""

import base64
import hashlib
import os
import queue
import socket
import struct
import threading

from . import canon, tracefile, wire
from .errors import ProtocolError, SwitchboardError

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".svg": "image/svg+xml",
    ".map": "application/json",
}

COMMANDS = ("deliverMessage", "deliverTimeout", "dropMessage",
            "duplicateMessage", "resetTo", "loadTrace")


def default_asset_dir():
    return os.path.join(os.path.dirname(__file__), "static")


# -- WebSocket framing (server side of RFC 6455) -------------------------

def handshake_accept(key):
    digest = hashlib.sha1((key + _WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def encode_text_frame(text):
    payload = text.encode("utf-8")
    n = len(payload)
    if n < 126:
        head = struct.pack("!BB", 0x81, n)
    elif n < 1 << 16:
        head = struct.pack("!BBH", 0x81, 126, n)
    else:
        head = struct.pack("!BBQ", 0x81, 127, n)
    return head + payload


def encode_close_frame():
    return struct.pack("!BB", 0x88, 0)


def encode_pong_frame(payload):
    return struct.pack("!BB", 0x8A, len(payload)) + payload


def read_frame(reader):
    """One (opcode, payload) pair, or None at end of stream."""
    head = reader.read(2)
    if len(head) < 2:
        return None
    fin = head[0] & 0x80
    opcode = head[0] & 0x0F
    masked = head[1] & 0x80
    n = head[1] & 0x7F
    if n == 126:
        n = struct.unpack("!H", reader.read(2))[0]
    elif n == 127:
        n = struct.unpack("!Q", reader.read(8))[0]
    mask = reader.read(4) if masked else b""
    payload = reader.read(n)
    if len(payload) < n:
        return None
    if masked:
        payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
    if not fin:
        # continuation frames: keep reading until fin, same unmasking
        rest = read_frame(reader)
        if rest is None or rest[0] != 0:
            return None
        payload += rest[1]
    return opcode, payload


class _Connection:
    """One frontend client: a socket, its watermark, and its writer thread."""

    def __init__(self, sock, session):
        self.sock = sock
        self.session = session
        self.mark = -1
        self.outbox = queue.Queue()
        self.alive = True

    def wake(self, error=None):
        if self.alive:
            self.outbox.put(error)

    def writer_loop(self):
        while True:
            item = self.outbox.get()
            if item is StopIteration:
                return
            update, self.mark = self.session.update_since(self.mark)
            if item is not None:
                update.error = item
            try:
                self.sock.sendall(encode_text_frame(canon.dumps(update.to_json())))
            except OSError:
                self.alive = False
                return

    def stop(self):
        self.alive = False
        self.outbox.put(StopIteration)
        try:
            self.sock.close()
        except OSError:
            pass


class FrontendServer:
    """Serves the UI and speaks the command/update protocol over WebSocket."""

    def __init__(self, session, host="127.0.0.1", port=wire.UI_PORT,
                 serve_assets=True, asset_dir=None):
        self.session = session
        self.serve_assets = serve_assets
        self.asset_dir = asset_dir or default_asset_dir()
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((host, port))
        self._sock.listen(16)
        self.port = self._sock.getsockname()[1]
        self._conns = set()
        self._lock = threading.Lock()
        self._closed = False
        session.on_change(self._broadcast)
        self._thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._thread.start()

    def _broadcast(self):
        with self._lock:
            conns = list(self._conns)
        for conn in conns:
            conn.wake()

    def _accept_loop(self):
        while True:
            try:
                sock, _ = self._sock.accept()
            except OSError:
                return
            threading.Thread(target=self._serve, args=(sock,), daemon=True).start()

    # -- HTTP entry ------------------------------------------------------

    def _serve(self, sock):
        try:
            reader = sock.makefile("rb")
            request = reader.readline().decode("latin-1").strip()
            headers = {}
            while True:
                line = reader.readline().decode("latin-1").strip()
                if not line:
                    break
                key, _, value = line.partition(":")
                headers[key.strip().lower()] = value.strip()
            parts = request.split()
            if len(parts) != 3 or parts[0] != "GET":
                self._respond(sock, "405 Method Not Allowed", b"GET only\n")
                return
            path = parts[1].split("?", 1)[0]
            if headers.get("upgrade", "").lower() == "websocket":
                self._websocket(sock, reader, headers)
            else:
                self._asset(sock, path)
        except OSError:
            pass
        finally:
            try:
                sock.close()
            except OSError:
                pass

    def _respond(self, sock, status, body, content_type="text/plain; charset=utf-8"):
        head = (f"HTTP/1.1 {status}\r\nContent-Type: {content_type}\r\n"
                f"Content-Length: {len(body)}\r\nConnection: close\r\n\r\n")
        sock.sendall(head.encode("latin-1") + body)

    def _asset(self, sock, path):
        if not self.serve_assets:
            self._respond(sock, "404 Not Found", b"headless server: no UI assets\n")
            return
        name = "index.html" if path == "/" else path.lstrip("/")
        full = os.path.realpath(os.path.join(self.asset_dir, name))
        # realpath comparison keeps ".." tricks inside the asset dir
        if not full.startswith(os.path.realpath(self.asset_dir) + os.sep):
            self._respond(sock, "404 Not Found", b"not found\n")
            return
        if not os.path.isfile(full):
            self._respond(sock, "404 Not Found", b"not found\n")
            return
        with open(full, "rb") as f:
            body = f.read()
        ext = os.path.splitext(full)[1]
        ctype = _CONTENT_TYPES.get(ext, "application/octet-stream")
        self._respond(sock, "200 OK", body, ctype)

    # -- WebSocket channel -------------------------------------------------

    def _websocket(self, sock, reader, headers):
        key = headers.get("sec-websocket-key")
        if not key:
            self._respond(sock, "400 Bad Request", b"missing websocket key\n")
            return
        sock.sendall((
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\nConnection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {handshake_accept(key)}\r\n\r\n"
        ).encode("latin-1"))

        conn = _Connection(sock, self.session)
        with self._lock:
            if self._closed:
                conn.stop()
                return
            self._conns.add(conn)
        writer = threading.Thread(target=conn.writer_loop, daemon=True)
        writer.start()
        conn.wake()  # initial full update
        try:
            while True:
                frame = read_frame(reader)
                if frame is None:
                    return
                opcode, payload = frame
                if opcode == 0x8:  # close
                    try:
                        sock.sendall(encode_close_frame())
                    except OSError:
                        pass
                    return
                if opcode == 0x9:  # ping
                    sock.sendall(encode_pong_frame(payload))
                    continue
                if opcode != 0x1:
                    continue
                error = self._execute(payload)
                if error is not None:
                    conn.wake(error)
        finally:
            with self._lock:
                self._conns.discard(conn)
            conn.stop()

    def _execute(self, payload):
        """Run one command; returns an error message or None on success."""
        try:
            command = self._parse(payload)
            self._dispatch(command)
            return None
        except SwitchboardError as e:
            return str(e)

    def _parse(self, payload):
        try:
            command = canon.loads(payload)
        except (ValueError, UnicodeDecodeError) as e:
            raise ProtocolError(f"malformed command: {e}") from None
        if not isinstance(command, dict) or command.get("cmd") not in COMMANDS:
            raise ProtocolError(
                f"unknown command {command.get('cmd')!r}"
                if isinstance(command, dict) else "command must be an object")
        return command

    def _field(self, command, key):
        value = command.get(key)
        if not isinstance(value, int) or isinstance(value, bool):
            raise ProtocolError(f"command field {key!r} must be an id")
        return value

    def _dispatch(self, command):
        cmd = command["cmd"]
        session = self.session
        if cmd == "deliverMessage":
            ref = self._field(command, "id")
            if session.snapshot.find_message(ref) is None:
                raise ProtocolError(f"id {ref} is not a deliverable message")
            session.deliver(ref)
        elif cmd == "deliverTimeout":
            ref = self._field(command, "id")
            if session.snapshot.find_timeout(ref) is None:
                raise ProtocolError(f"id {ref} is not a pending timeout")
            session.deliver(ref)
        elif cmd == "dropMessage":
            session.drop(self._field(command, "id"))
        elif cmd == "duplicateMessage":
            session.duplicate(self._field(command, "id"))
        elif cmd == "resetTo":
            session.reset_to(self._field(command, "historyNodeId"))
        elif cmd == "loadTrace":
            path = command.get("path")
            if not isinstance(path, str):
                raise ProtocolError("loadTrace needs a file path")
            tracefile.load_trace(path, session)

    def close(self):
        with self._lock:
            if self._closed:
                return
            self._closed = True
            conns = list(self._conns)
            self._conns.clear()
        self._sock.close()
        for conn in conns:
            conn.stop()

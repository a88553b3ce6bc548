"""Node-side library: write a system under test as deterministic event handlers.

A node subclasses Node and overrides on_start/on_message/on_timeout. All
effects go through the HandlerContext; the runtime buffers them and emits
exactly one response frame per event. Handlers must be deterministic
functions of (local state, event payload) and must not do their own I/O,
otherwise replay-based time travel is unsound.
"""

import argparse
import socket
import sys
import traceback

from . import wire
from .errors import ProtocolError


class Node:
    """A node definition: a name plus handlers for start/message/timeout."""

    def __init__(self, name):
        self.name = name

    def on_start(self, ctx):
        pass

    def on_message(self, ctx, sender, type, body):
        pass

    def on_timeout(self, ctx, type, body):
        pass


class HandlerContext:
    """Collects the effects of one handler invocation.

    state holds the node's complete local state; replace it or mutate it in
    place, the full value is reported either way.
    """

    def __init__(self, state):
        self.state = state
        self._messages = []
        self._set = []
        self._cleared = []

    def send(self, to, type, body):
        self._messages.append((to, type, body))

    def set_timeout(self, type, body):
        self._set.append((type, body))

    def clear_timeout(self, type, body):
        self._cleared.append((type, body))

    def response_frame(self):
        return wire.response_frame(self.state, self._messages, self._set, self._cleared)


class NodeRuntime:
    """Drives one Node's handlers from decoded frames; transport-agnostic."""

    def __init__(self, node):
        self.node = node
        self.state = {}

    def handle_frame(self, frame):
        """Process one server frame, return the response frame."""
        msgtype = frame["msgtype"]
        if msgtype == "start":
            # A start at any time (first boot or a reset) wipes all prior
            # state; that is what makes replay-based time travel sound.
            self.state = {}
            ctx = HandlerContext(self.state)
            self.node.on_start(ctx)
        elif msgtype == "message":
            ctx = HandlerContext(self.state)
            self.node.on_message(ctx, frame["from"], frame["type"], frame["body"])
        elif msgtype == "timeout":
            ctx = HandlerContext(self.state)
            self.node.on_timeout(ctx, frame["type"], frame["body"])
        else:
            raise ProtocolError(f"server sent unexpected frame {msgtype!r}")
        self.state = ctx.state
        return ctx.response_frame()

    def handle_line(self, line):
        return wire.encode_frame(self.handle_frame(wire.decode_frame(line)))


def run_node(node, address):
    """Connect to the debugger, register, then serve events forever.

    A handler exception is session-fatal: the traceback goes to stderr and
    the connection is closed so the server sees the node die rather than
    receiving a made-up response.
    """
    host, port = address
    sock = socket.create_connection((host, port))
    runtime = NodeRuntime(node)
    try:
        sock.sendall(wire.encode_frame({"msgtype": "register", "name": node.name}))
        reader = sock.makefile("rb")
        for line in reader:
            try:
                response = runtime.handle_line(line)
            except ProtocolError:
                raise
            except Exception:
                print(f"node {node.name}: handler failed, aborting session",
                      file=sys.stderr)
                traceback.print_exc()
                return 1
            sock.sendall(response)
        return 0
    finally:
        sock.close()


def parse_address(text):
    host, _, port = text.rpartition(":")
    return (host or "localhost", int(port))


def standalone_main(nodes, argv=None, description=None):
    """Entry point used by the fixture demo programs: run nodes in threads."""
    import threading

    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--server", default=f"localhost:{wire.NODE_PORT}",
                        help="debugger address as host:port")
    args = parser.parse_args(argv)
    address = parse_address(args.server)

    threads = [threading.Thread(target=run_node, args=(n, address), daemon=True)
               for n in nodes]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    return 0

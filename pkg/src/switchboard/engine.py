"""The debugger backend: owns the session and implements time travel.

All observable state transitions are serialized through one lock, so
frontend commands and trace replay never interleave mid-event. Time travel
works by re-sending start to every node and replaying the recorded event
path; it is only sound for deterministic handlers, and every replayed step
is checked against the stored snapshot to catch violations immediately.
"""

import threading
from dataclasses import dataclass

from . import model, wire
from .errors import (DeterminismError, DuplicateIdError, ShimError,
                     UnknownItemError)

FIRST_ID = 1  # 0 is never used, so ids are always truthy


@dataclass
class FrontendUpdate:
    """One push to a frontend: full snapshot, new history nodes, cursor."""

    snapshot: model.SystemSnapshot
    history_delta: list
    cursor: int
    error: str = None

    def to_json(self):
        obj = {"snapshot": self.snapshot.to_json(),
               "historyDelta": self.history_delta, "cursor": self.cursor}
        if self.error is not None:
            obj["error"] = self.error
        return obj


class Session:
    """One debugging session over a fixed set of registered nodes."""

    def __init__(self, handles):
        if not handles:
            raise ValueError("a session needs at least one node")
        self.handles = dict(handles)
        self.names = sorted(self.handles)
        self.tree = None
        self._next_id = FIRST_ID
        self._lock = threading.RLock()
        self._delta_mark = -1   # highest history id already reported
        self._listeners = []

    # -- lifecycle -----------------------------------------------------

    def start(self):
        """Send start to every node (lexicographic), record the root state."""
        with self._lock:
            if self.tree is not None:
                raise RuntimeError("session already started")
            snapshot, self._next_id = self._run_start(FIRST_ID)
            self.tree = model.HistoryTree(snapshot)
            self._notify()
            return self.tree.root

    def _run_start(self, next_id):
        snapshot = model.SystemSnapshot.initial(self.names)
        for name in self.names:
            response = self._call(name, wire.start_frame())
            snapshot, next_id = model.apply_response(snapshot, name, response, next_id)
        return snapshot, next_id

    def _call(self, name, frame):
        response = self.handles[name].call(frame)
        return wire.response_from_frame(response)

    @property
    def snapshot(self):
        return self.tree.node(self.tree.cursor).snapshot

    @property
    def cursor(self):
        return self.tree.cursor

    # -- user-chosen events ---------------------------------------------

    def deliver(self, ref_id):
        """Deliver the message or timeout with this id from the cursor state."""
        with self._lock:
            snapshot = self.snapshot
            message = snapshot.find_message(ref_id)
            if message is not None:
                event = model.DeliverMessage(message)
                frame = wire.message_frame(message)
                node = message.to
            else:
                timeout = snapshot.find_timeout(ref_id)
                if timeout is None:
                    raise UnknownItemError(
                        f"no deliverable item with id {ref_id} in the current state")
                event = model.DeliverTimeout(timeout)
                frame = wire.timeout_frame(timeout)
                node = timeout.node
            response = self._call(node, frame)
            snapshot, self._next_id = model.apply_delivery(
                snapshot, event, response, self._next_id)
            new_id = self.tree.append(self.cursor, event, snapshot)
            self._notify()
            return new_id

    def drop(self, message_id):
        """Remove an in-flight message; recorded in history, no node involved."""
        with self._lock:
            snapshot = self.snapshot
            message = snapshot.find_message(message_id)
            if message is None:
                if snapshot.find_timeout(message_id) is not None:
                    raise UnknownItemError(
                        f"id {message_id} is a timeout; only messages can be dropped")
                raise UnknownItemError(f"no in-flight message with id {message_id}")
            snapshot = model.apply_drop(snapshot, message_id)
            new_id = self.tree.append(
                self.cursor, model.DropMessage(message), snapshot)
            self._notify()
            return new_id

    def duplicate(self, message_id):
        """Append an identical copy of an in-flight message, with a fresh id."""
        with self._lock:
            snapshot = self.snapshot
            message = snapshot.find_message(message_id)
            if message is None:
                if snapshot.find_timeout(message_id) is not None:
                    raise UnknownItemError(
                        f"id {message_id} is a timeout; only messages can be duplicated")
                raise UnknownItemError(f"no in-flight message with id {message_id}")
            copy_id = self._next_id
            snapshot = model.apply_duplicate(snapshot, message_id, copy_id)
            self._next_id += 1
            new_id = self.tree.append(
                self.cursor, model.DuplicateMessage(message, copy_id), snapshot)
            self._notify()
            return new_id

    # -- time travel -----------------------------------------------------

    def reset_to(self, history_id):
        """Reset the whole system to a previously visited state by replay.

        Re-sends start to every node, then replays the event path from the
        root. Each replayed snapshot must match the stored one byte for
        byte; the first divergence raises DeterminismError naming the node.
        """
        with self._lock:
            path = self.tree.path_nodes(history_id)  # validates history_id
            try:
                snapshot, next_id = self._run_start(FIRST_ID)
                self._check_replay(path[0], snapshot)
                for node in path[1:]:
                    try:
                        snapshot, next_id = self._replay_event(
                            node.event, snapshot, next_id)
                    except (UnknownItemError, DuplicateIdError) as e:
                        # the recorded item no longer exists in the replayed
                        # state: same root cause as a snapshot mismatch
                        raise DeterminismError(
                            node.id, f"replay diverged at history node "
                                     f"{node.id}: {e}") from e
                    self._check_replay(node, snapshot)
            except (ShimError, DeterminismError):
                self._recover_to_root()
                raise
            self._next_id = next_id
            self.tree.cursor = history_id
            self._notify()

    def _replay_event(self, event, snapshot, next_id):
        if isinstance(event, model.DeliverMessage):
            response = self._call(event.message.to, wire.message_frame(event.message))
            return model.apply_delivery(snapshot, event, response, next_id)
        if isinstance(event, model.DeliverTimeout):
            response = self._call(event.timeout.node, wire.timeout_frame(event.timeout))
            return model.apply_delivery(snapshot, event, response, next_id)
        if isinstance(event, model.DropMessage):
            return model.apply_drop(snapshot, event.message.id), next_id
        if isinstance(event, model.DuplicateMessage):
            # the copy id must replay identically; the counter advances past it
            if event.copy_id != next_id:
                raise DeterminismError(
                    None, f"replayed duplicate id {next_id} differs from "
                          f"recorded {event.copy_id}")
            return model.apply_duplicate(
                snapshot, event.original.id, event.copy_id), next_id + 1
        raise TypeError(f"cannot replay event {event!r}")

    def _check_replay(self, stored, snapshot):
        if snapshot.canonical() != stored.snapshot.canonical():
            raise DeterminismError(
                stored.id,
                f"replay diverged at history node {stored.id} "
                f"({stored.event.label()}); handlers are not deterministic")

    def _recover_to_root(self):
        """Best effort: put the shims back in the root state after a failed replay."""
        try:
            snapshot, next_id = self._run_start(FIRST_ID)
        except ShimError:
            return  # node is gone; session is unusable until it reconnects
        root = self.tree.node(self.tree.root)
        if snapshot.canonical() == root.snapshot.canonical():
            self._next_id = next_id
            self.tree.cursor = self.tree.root
            self._notify()

    # -- frontend feed -----------------------------------------------------

    def update_since(self, mark):
        """Snapshot plus all history nodes with id > mark; returns (update, mark)."""
        with self._lock:
            delta = [self.tree.nodes[i].summary()
                     for i in sorted(self.tree.nodes) if i > mark]
            update = FrontendUpdate(snapshot=self.snapshot, history_delta=delta,
                                    cursor=self.cursor)
            return update, max(self.tree.nodes)

    def current_update(self):
        """The session-level update stream: history delta since the last call."""
        with self._lock:
            update, self._delta_mark = self.update_since(self._delta_mark)
            return update

    def on_change(self, listener):
        """Register a callback fired after every applied event or reset."""
        self._listeners.append(listener)

    def _notify(self):
        for listener in list(self._listeners):
            listener()

    def close(self):
        for handle in self.handles.values():
            handle.close()


def start_session(handles):
    """Create a session over registered node handles and run the start event."""
    session = Session(handles)
    session.start()
    return session

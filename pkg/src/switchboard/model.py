"""Pure data model: global system state and the branching event history.

Nothing in this module does I/O or talks to nodes. The engine feeds it
handler responses; it produces new snapshots. All apply_* functions leave
their inputs untouched, so history nodes can safely share structure.
"""

from dataclasses import dataclass, field

from . import canon
from .errors import DuplicateIdError, UnknownItemError


@dataclass(frozen=True)
class Envelope:
    """An in-flight message sitting in the receiver's inbox."""

    id: int
    sender: str
    to: str
    type: str
    body: object

    def to_json(self):
        return {"id": self.id, "from": self.sender, "to": self.to,
                "type": self.type, "body": self.body}

    @classmethod
    def from_json(cls, obj):
        return cls(id=obj["id"], sender=obj["from"], to=obj["to"],
                   type=obj["type"], body=obj["body"])


@dataclass(frozen=True)
class TimeoutEntry:
    """A pending timeout a node has set for itself; fires only when delivered."""

    id: int
    node: str
    type: str
    body: object

    def to_json(self):
        return {"id": self.id, "node": self.node, "type": self.type, "body": self.body}

    @classmethod
    def from_json(cls, obj):
        return cls(id=obj["id"], node=obj["node"], type=obj["type"], body=obj["body"])


@dataclass(frozen=True)
class HandlerResponse:
    """What a node reports after handling an event: full new state plus effects.

    messages entries are (to, type, body); timeout entries are (type, body).
    """

    state: object
    messages: tuple = ()
    timeouts_set: tuple = ()
    timeouts_cleared: tuple = ()


@dataclass(frozen=True)
class Inbox:
    """Undelivered messages and pending timeouts at one node, in arrival order.

    Order is display-stable only; any element may be delivered next.
    """

    messages: tuple = ()
    timeouts: tuple = ()

    def to_json(self):
        return {"messages": [m.to_json() for m in self.messages],
                "timeouts": [t.to_json() for t in self.timeouts]}

    @classmethod
    def from_json(cls, obj):
        return cls(messages=tuple(Envelope.from_json(m) for m in obj["messages"]),
                   timeouts=tuple(TimeoutEntry.from_json(t) for t in obj["timeouts"]))


@dataclass(frozen=True)
class SystemSnapshot:
    """Global state at one point in history: per-node local states and inboxes."""

    states: dict
    inboxes: dict

    @classmethod
    def initial(cls, node_names):
        return cls(states={n: {} for n in node_names},
                   inboxes={n: Inbox() for n in node_names})

    @property
    def nodes(self):
        return sorted(self.states)

    def find_message(self, message_id):
        for inbox in self.inboxes.values():
            for m in inbox.messages:
                if m.id == message_id:
                    return m
        return None

    def find_timeout(self, timeout_id):
        for inbox in self.inboxes.values():
            for t in inbox.timeouts:
                if t.id == timeout_id:
                    return t
        return None

    def all_ids(self):
        ids = set()
        for inbox in self.inboxes.values():
            ids.update(m.id for m in inbox.messages)
            ids.update(t.id for t in inbox.timeouts)
        return ids

    def to_json(self):
        return {"states": {n: s for n, s in sorted(self.states.items())},
                "inboxes": {n: b.to_json() for n, b in sorted(self.inboxes.items())}}

    @classmethod
    def from_json(cls, obj):
        return cls(states=dict(obj["states"]),
                   inboxes={n: Inbox.from_json(b) for n, b in obj["inboxes"].items()})

    def canonical(self):
        """Canonical byte form; two snapshots are equal iff these bytes are.

        Cached on first use: snapshots are never mutated once built (replay
        correctness already depends on that), and resets re-serialize every
        stored snapshot on the path, which would dominate exploration time.
        """
        cached = self.__dict__.get("_canonical")
        if cached is None:
            cached = canon.dump_bytes_trusted(self.to_json())
            object.__setattr__(self, "_canonical", cached)
        return cached


# -- Events ------------------------------------------------------------

@dataclass(frozen=True)
class Start:
    def to_json(self):
        return {"event": "start"}

    def label(self):
        return "start"


@dataclass(frozen=True)
class DeliverMessage:
    message: Envelope

    def to_json(self):
        return {"event": "deliver_message", "message": self.message.to_json()}

    def label(self):
        m = self.message
        return f"deliver {m.type} {m.sender}→{m.to}"


@dataclass(frozen=True)
class DeliverTimeout:
    timeout: TimeoutEntry

    def to_json(self):
        return {"event": "deliver_timeout", "timeout": self.timeout.to_json()}

    def label(self):
        t = self.timeout
        return f"deliver {t.type} @{t.node}"


@dataclass(frozen=True)
class DropMessage:
    message: Envelope

    def to_json(self):
        return {"event": "drop_message", "message": self.message.to_json()}

    def label(self):
        m = self.message
        return f"drop {m.type} {m.sender}→{m.to}"


@dataclass(frozen=True)
class DuplicateMessage:
    original: Envelope
    copy_id: int

    def to_json(self):
        return {"event": "duplicate_message", "message": self.original.to_json(),
                "copy_id": self.copy_id}

    def label(self):
        m = self.original
        return f"dup {m.type} {m.sender}→{m.to}"


def event_from_json(obj):
    kind = obj["event"]
    if kind == "start":
        return Start()
    if kind == "deliver_message":
        return DeliverMessage(Envelope.from_json(obj["message"]))
    if kind == "deliver_timeout":
        return DeliverTimeout(TimeoutEntry.from_json(obj["timeout"]))
    if kind == "drop_message":
        return DropMessage(Envelope.from_json(obj["message"]))
    if kind == "duplicate_message":
        return DuplicateMessage(Envelope.from_json(obj["message"]), obj["copy_id"])
    raise ValueError(f"unknown event kind {kind!r}")


# -- State transitions -------------------------------------------------

def _same_payload(entry, type, body):
    return entry.type == type and canon.dumps(entry.body) == canon.dumps(body)


def apply_response(snapshot, node, response, next_id):
    """Fold one handler response into the snapshot; returns (snapshot, next_id).

    Application order: replace local state, remove cleared timeouts, append
    set timeouts, then append outgoing messages to the receivers' inboxes.
    Fresh ids are taken consecutively from next_id, timeouts first.
    """
    if node not in snapshot.inboxes:
        raise UnknownItemError(f"node {node!r} is not registered")
    states = dict(snapshot.states)
    inboxes = dict(snapshot.inboxes)
    states[node] = response.state

    inbox = inboxes[node]
    timeouts = list(inbox.timeouts)
    for (t, b) in response.timeouts_cleared:
        timeouts = [entry for entry in timeouts if not _same_payload(entry, t, b)]
    for (t, b) in response.timeouts_set:
        timeouts.append(TimeoutEntry(id=next_id, node=node, type=t, body=b))
        next_id += 1
    inboxes[node] = Inbox(messages=inbox.messages, timeouts=tuple(timeouts))

    for (to, t, b) in response.messages:
        if to not in inboxes:
            raise UnknownItemError(
                f"node {node!r} sent a {t!r} message to unregistered node {to!r}")
        target = inboxes[to]
        env = Envelope(id=next_id, sender=node, to=to, type=t, body=b)
        next_id += 1
        inboxes[to] = Inbox(messages=target.messages + (env,), timeouts=target.timeouts)

    return SystemSnapshot(states=states, inboxes=inboxes), next_id


def apply_delivery(snapshot, event, response, next_id):
    """Deliver a message or timeout and fold in the handler's response.

    The delivered item must still be present in its inbox; a stale reference
    raises UnknownItemError. Returns (new snapshot, next unused id).
    """
    if isinstance(event, DeliverMessage):
        item = event.message
        node = item.to
        inbox = snapshot.inboxes.get(node)
        if inbox is None or item not in inbox.messages:
            raise UnknownItemError(
                f"message {item.id} is not in {node!r}'s inbox (stale delivery)")
        trimmed = Inbox(messages=tuple(m for m in inbox.messages if m.id != item.id),
                        timeouts=inbox.timeouts)
    elif isinstance(event, DeliverTimeout):
        item = event.timeout
        node = item.node
        inbox = snapshot.inboxes.get(node)
        if inbox is None or item not in inbox.timeouts:
            raise UnknownItemError(
                f"timeout {item.id} is not pending at {node!r} (stale delivery)")
        trimmed = Inbox(messages=inbox.messages,
                        timeouts=tuple(t for t in inbox.timeouts if t.id != item.id))
    else:
        raise TypeError(f"not a delivery event: {event!r}")

    inboxes = dict(snapshot.inboxes)
    inboxes[node] = trimmed
    snapshot = SystemSnapshot(states=dict(snapshot.states), inboxes=inboxes)
    return apply_response(snapshot, node, response, next_id)


def apply_drop(snapshot, message_id):
    """Remove one in-flight message; no handler runs, nothing else changes."""
    for node, inbox in snapshot.inboxes.items():
        for m in inbox.messages:
            if m.id == message_id:
                inboxes = dict(snapshot.inboxes)
                inboxes[node] = Inbox(
                    messages=tuple(x for x in inbox.messages if x.id != message_id),
                    timeouts=inbox.timeouts)
                return SystemSnapshot(states=dict(snapshot.states), inboxes=inboxes)
    raise UnknownItemError(f"no in-flight message with id {message_id}")


def apply_duplicate(snapshot, message_id, fresh_id):
    """Append an identical copy (with fresh_id) next to the original's inbox tail."""
    if fresh_id in snapshot.all_ids():
        raise DuplicateIdError(f"id {fresh_id} is already in use")
    for node, inbox in snapshot.inboxes.items():
        for m in inbox.messages:
            if m.id == message_id:
                copy = Envelope(id=fresh_id, sender=m.sender, to=m.to,
                                type=m.type, body=m.body)
                inboxes = dict(snapshot.inboxes)
                inboxes[node] = Inbox(messages=inbox.messages + (copy,),
                                      timeouts=inbox.timeouts)
                return SystemSnapshot(states=dict(snapshot.states), inboxes=inboxes)
    raise UnknownItemError(f"no in-flight message with id {message_id}")


# -- History -----------------------------------------------------------

@dataclass(frozen=True)
class HistoryNode:
    id: int
    parent: object  # parent id, or None at the root
    event: object
    snapshot: SystemSnapshot

    def summary(self):
        return {"id": self.id, "parent": self.parent,
                "label": self.event.label(), "event": self.event.to_json()}


class HistoryTree:
    """Branching tree of (event, snapshot) nodes; the unit of time travel.

    The root always carries the Start event. The cursor points at the state
    currently shown/being extended. Nodes are append-only.
    """

    def __init__(self, root_snapshot):
        root = HistoryNode(id=0, parent=None, event=Start(), snapshot=root_snapshot)
        self.nodes = {0: root}
        self.root = 0
        self.cursor = 0
        self._next = 1

    def __contains__(self, node_id):
        return node_id in self.nodes

    def node(self, node_id):
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownItemError(f"no history node {node_id}") from None

    def append(self, parent_id, event, snapshot):
        """Add a child under parent_id, move the cursor to it, return its id."""
        if parent_id not in self.nodes:
            raise UnknownItemError(f"no history node {parent_id}")
        if isinstance(event, Start):
            raise ValueError("start can only appear at the root")
        node = HistoryNode(id=self._next, parent=parent_id, event=event,
                           snapshot=snapshot)
        self.nodes[node.id] = node
        self._next += 1
        self.cursor = node.id
        return node.id

    def children(self, node_id):
        return [n.id for n in self.nodes.values() if n.parent == node_id]

    def path_nodes(self, node_id):
        """HistoryNodes from the root to node_id, root first."""
        node = self.node(node_id)
        path = [node]
        while node.parent is not None:
            node = self.nodes[node.parent]
            path.append(node)
        path.reverse()
        return path

    def path_to_root(self, node_id):
        """Events from the root (Start first) to node_id inclusive."""
        return [n.event for n in self.path_nodes(node_id)]

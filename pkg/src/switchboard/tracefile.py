"""Execution traces: a portable text format plus a bounded exhaustive explorer.

A trace file lets an external producer (a model checker, a log miner, or
this module's explorer) hand the debugger an event sequence to replay and
branch from. Messages are referenced positionally (inbox index at that
step) with the expected sender and type as a checksum, so producers never
need to know the debugger's internal id scheme. See docs/trace-format.md.
"""

import io
from dataclasses import dataclass

from . import canon, model
from .errors import TraceError

FORMAT_VERSION = 1

DELIVER_TIMEOUT = "DELIVER_TIMEOUT"
DELIVER_MSG = "DELIVER_MSG"
DROP = "DROP"
DUP = "DUP"

_KINDS = (DELIVER_TIMEOUT, DELIVER_MSG, DROP, DUP)


@dataclass(frozen=True)
class TraceStep:
    """One event line: DELIVER_TIMEOUT carries (node, type, body); the
    message kinds carry (to, index-in-inbox, expected from, expected type)."""

    kind: str
    fields: tuple

    def line(self):
        return f"{self.kind} {canon.dumps(list(self.fields))}"


@dataclass(frozen=True)
class Trace:
    """Node names plus the event steps after start (start itself is implied)."""

    nodes: tuple
    steps: tuple

    def __len__(self):
        return len(self.steps)

    def to_text(self):
        header = canon.dumps({"nodes": list(self.nodes), "v": FORMAT_VERSION})
        return "\n".join([header] + [s.line() for s in self.steps]) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise TraceError("empty trace file: missing header")
        try:
            header = canon.loads(lines[0])
        except ValueError as e:
            raise TraceError(f"bad header: {e}") from None
        if not isinstance(header, dict) or "nodes" not in header:
            raise TraceError("bad header: expected a node list")
        if header.get("v") != FORMAT_VERSION:
            raise TraceError(f"unsupported trace version {header.get('v')!r}")
        steps = []
        for i, line in enumerate(lines[1:], start=1):
            kind, _, payload = line.partition(" ")
            if kind not in _KINDS:
                raise TraceError(f"unknown step kind {kind!r}", step=i)
            try:
                fields = canon.loads(payload)
            except ValueError as e:
                raise TraceError(f"bad step payload: {e}", step=i)
            if not isinstance(fields, list):
                raise TraceError("step payload must be an array", step=i)
            want = 3 if kind == DELIVER_TIMEOUT else 4
            if len(fields) != want:
                raise TraceError(
                    f"{kind} expects {want} fields, got {len(fields)}", step=i)
            steps.append(TraceStep(kind, tuple(fields)))
        return cls(nodes=tuple(header["nodes"]), steps=tuple(steps))


def _message_index(snapshot, envelope):
    inbox = snapshot.inboxes[envelope.to]
    for i, m in enumerate(inbox.messages):
        if m.id == envelope.id:
            return i
    raise TraceError(f"message {envelope.id} missing from its inbox")


def trace_from_history(tree, leaf_id):
    """Build a Trace for the path from the root to leaf_id."""
    path = tree.path_nodes(leaf_id)
    nodes = tuple(path[0].snapshot.nodes)
    steps = []
    for parent, hist in zip(path, path[1:]):
        event = hist.event
        before = parent.snapshot
        if isinstance(event, model.DeliverTimeout):
            t = event.timeout
            steps.append(TraceStep(DELIVER_TIMEOUT, (t.node, t.type, t.body)))
            continue
        if isinstance(event, model.DeliverMessage):
            kind, m = DELIVER_MSG, event.message
        elif isinstance(event, model.DropMessage):
            kind, m = DROP, event.message
        elif isinstance(event, model.DuplicateMessage):
            kind, m = DUP, event.original
        else:
            raise TraceError(f"cannot serialize event {event!r}")
        steps.append(TraceStep(kind, (m.to, _message_index(before, m),
                                      m.sender, m.type)))
    return Trace(nodes=nodes, steps=tuple(steps))


def write_trace(tree, leaf_id, destination):
    """Serialize the root-to-leaf path into the trace file format."""
    text = trace_from_history(tree, leaf_id).to_text()
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as f:
            f.write(text)


def _read_source(source):
    if hasattr(source, "read"):
        return source.read()
    with open(source, "r", encoding="utf-8") as f:
        return f.read()


def _resolve_step(snapshot, step, index):
    """Find the live item a step refers to; raises TraceError naming the step."""
    if step.kind == DELIVER_TIMEOUT:
        node, ttype, body = step.fields
        inbox = snapshot.inboxes.get(node)
        if inbox is None:
            raise TraceError(f"step {index}: unknown node {node!r}", step=index)
        wanted = canon.dumps(body)
        for t in inbox.timeouts:
            if t.type == ttype and canon.dumps(t.body) == wanted:
                return t
        raise TraceError(
            f"step {index}: no pending timeout {ttype!r} at {node!r}", step=index)
    to, pos, sender, mtype = step.fields
    inbox = snapshot.inboxes.get(to)
    if inbox is None:
        raise TraceError(f"step {index}: unknown node {to!r}", step=index)
    if not isinstance(pos, int) or not 0 <= pos < len(inbox.messages):
        raise TraceError(
            f"step {index}: no message at index {pos} in {to!r}'s inbox "
            f"({len(inbox.messages)} waiting)", step=index)
    m = inbox.messages[pos]
    if m.sender != sender or m.type != mtype:
        raise TraceError(
            f"step {index}: expected {mtype!r} from {sender!r} at index {pos}, "
            f"found {m.type!r} from {m.sender!r}", step=index)
    return m


def load_trace(source, session):
    """Replay a trace into a started session; returns the final history id.

    The session is first reset to the root, then each step is resolved
    against the live state and applied through the engine, so the loaded
    history is genuine replayable history like any user-driven run.
    """
    trace = source if isinstance(source, Trace) else Trace.from_text(_read_source(source))
    if set(trace.nodes) != set(session.names):
        raise TraceError(
            f"trace is for nodes {sorted(trace.nodes)}, "
            f"session has {session.names}")
    session.reset_to(session.tree.root)
    for i, step in enumerate(trace.steps, start=1):
        item = _resolve_step(session.snapshot, step, i)
        if step.kind in (DELIVER_TIMEOUT, DELIVER_MSG):
            session.deliver(item.id)
        elif step.kind == DROP:
            session.drop(item.id)
        else:
            session.duplicate(item.id)
    return session.cursor


# -- Bounded exhaustive exploration --------------------------------------

def logical_key(snapshot):
    """Canonical form with volatile ids stripped; used to recognize revisits.

    Handlers never see ids, so two states equal under this key evolve
    identically; pruning on it cannot hide a reachable violation.
    """
    states = {n: snapshot.states[n] for n in sorted(snapshot.states)}
    inboxes = {}
    for n in sorted(snapshot.inboxes):
        inbox = snapshot.inboxes[n]
        inboxes[n] = {
            "messages": [[m.sender, m.type, m.body] for m in inbox.messages],
            "timeouts": [[t.type, t.body] for t in inbox.timeouts]}
    return canon.dumps_trusted({"states": states, "inboxes": inboxes})


def _choices(snapshot, allow_dup_drop):
    """Deterministic enumeration of next events: deliveries, then faults."""
    message_ids = sorted(m.id for b in snapshot.inboxes.values() for m in b.messages)
    timeout_ids = sorted(t.id for b in snapshot.inboxes.values() for t in b.timeouts)
    choices = [("deliver", i) for i in sorted(message_ids + timeout_ids)]
    if allow_dup_drop:
        choices += [("drop", i) for i in message_ids]
        choices += [("dup", i) for i in message_ids]
    return choices


def explore(session_factory, invariant, max_depth, allow_dup_drop=False,
            prune_visited=False, collect=None):
    """Depth-first search for a state violating the invariant.

    Enumerates every event choice from the start state down to max_depth,
    backtracking with engine resets. Returns the Trace of the first
    violating state found, or None if none exists within the depth bound.
    prune_visited skips states already seen (compared by logical_key).
    collect, if given, receives the canonical bytes of every visited state.
    """
    session = session_factory()
    try:
        return _explore(session, invariant, max_depth, allow_dup_drop,
                        prune_visited, collect)
    finally:
        session.close()


def _explore(session, invariant, max_depth, allow_dup_drop, prune_visited,
             collect):
    tree = session.tree
    expanded_at = {}

    def visit(node_id, depth):
        snapshot = tree.nodes[node_id].snapshot
        if collect is not None:
            collect.append(snapshot.canonical())
        if not invariant.holds(snapshot):
            return True
        if prune_visited:
            # prune only when an equivalent state was already expanded with
            # at least as much remaining depth, else deeper states reachable
            # from here could be missed
            key = logical_key(snapshot)
            before = expanded_at.get(key)
            if before is not None and before <= depth:
                return None
            expanded_at[key] = depth
        return False

    violated = visit(tree.root, 0)
    if violated:
        return trace_from_history(tree, tree.root)

    def dfs(node_id, depth):
        if depth == max_depth:
            return None
        for kind, item_id in _choices(tree.nodes[node_id].snapshot, allow_dup_drop):
            if session.cursor != node_id:
                session.reset_to(node_id)
            if kind == "deliver":
                child = session.deliver(item_id)
            elif kind == "drop":
                child = session.drop(item_id)
            else:
                child = session.duplicate(item_id)
            outcome = visit(child, depth + 1)
            if outcome is True:
                return child
            if outcome is None:
                continue
            found = dfs(child, depth + 1)
            if found is not None:
                return found
        return None

    leaf = dfs(tree.root, 0)
    if leaf is None:
        return None
    return trace_from_history(tree, leaf)

"""Render a history path as a space-time diagram in DOT form.

One vertical lane per node, one layer per event. Message edges run from
the anchor where the message was sent to the anchor where it was delivered
(or to a crossed-out anchor if it was dropped); duplicates share the
original's send anchor. Output is plain DOT text; rendering is left to
GraphViz or whatever the user prefers.
"""

from . import model

_LANE_EDGE = '[dir = none, weight = 1000];'


def _quote(text):
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _vertex(node, layer):
    return f'"{_quote(node)}@{layer}"'


def to_dot(tree, leaf_id):
    """DOT digraph for the root-to-leaf path; deterministic output."""
    path = tree.path_nodes(leaf_id)
    lanes = path[0].snapshot.nodes
    layers = len(path)

    # Where each envelope was sent from: id -> (lane, layer). Envelopes in
    # the root snapshot originate at layer 0; anything that appears after
    # event i was sent by that event's handler at layer i. A duplicate's
    # copy inherits the original's origin.
    origin = {}
    for m in _all_messages(path[0].snapshot):
        origin[m.id] = (m.sender, 0)
    for layer, hist in enumerate(path[1:], start=1):
        if isinstance(hist.event, model.DuplicateMessage):
            ev = hist.event
            origin[ev.copy_id] = origin[ev.original.id]
        for m in _all_messages(hist.snapshot):
            if m.id not in origin:
                origin[m.id] = (m.sender, layer)

    decorations = {}  # (lane, layer) -> label for timeout fires / drops
    edges = []
    for layer, hist in enumerate(path[1:], start=1):
        event = hist.event
        if isinstance(event, model.DeliverMessage):
            m = event.message
            edges.append((origin[m.id], (m.to, layer), m.type))
        elif isinstance(event, model.DeliverTimeout):
            t = event.timeout
            decorations[(t.node, layer)] = t.type
        elif isinstance(event, model.DropMessage):
            m = event.message
            edges.append((origin[m.id], (m.to, layer), m.type))
            decorations[(m.to, layer)] = "✕"

    out = ["digraph spacetime {"]
    for lane in lanes:
        out.append(f'  {_vertex(lane, 0)} [shape = box, label = "{_quote(lane)}"];')
        for layer in range(1, layers):
            label = decorations.get((lane, layer))
            if label is None:
                out.append(f'  {_vertex(lane, layer)} '
                           f'[shape = point, width = 0.05, height = 0.05];')
            else:
                out.append(f'  {_vertex(lane, layer)} '
                           f'[shape = box, label = "{_quote(label)}"];')
        for layer in range(1, layers):
            out.append(f'  {_vertex(lane, layer - 1)} -> '
                       f'{_vertex(lane, layer)} {_LANE_EDGE}')
        out.append("")
    for layer in range(layers):
        members = "; ".join(_vertex(lane, layer) for lane in lanes)
        out.append(f'  {{rank = same; {members};}}')
    out.append("")
    for (src, dst, label) in edges:
        out.append(f'  {_vertex(*src)} -> {_vertex(*dst)} '
                   f'[label = "{_quote(label)}", weight = 0, constraint = false];')
    out.append("}")
    return "\n".join(out) + "\n"


def _all_messages(snapshot):
    for inbox in snapshot.inboxes.values():
        yield from inbox.messages

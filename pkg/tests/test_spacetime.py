import re

from switchboard.fixtures import loopback_session
from switchboard.fixtures.echo import fixture_echo
from switchboard.fixtures.election import fixture_toy_election
from switchboard.spacetime import to_dot

MESSAGE_EDGE = re.compile(
    r'"(?P<src>[^"]+)@(?P<src_layer>\d+)" -> "(?P<dst>[^"]+)@(?P<dst_layer>\d+)" '
    r'\[label = "(?P<label>[^"]*)", weight = 0, constraint = false\];')

BOX = re.compile(r'"(?P<node>[^"]+)@(?P<layer>\d+)" \[shape = box, '
                 r'label = "(?P<label>[^"]*)"\];')


def message_edges(dot):
    return [m.groupdict() for line in dot.splitlines()
            if (m := MESSAGE_EDGE.search(line))]


def boxes(dot):
    return {(m["node"], int(m["layer"])): m["label"]
            for line in dot.splitlines() if (m := BOX.search(line))}


def ping_pong_session():
    session = loopback_session(fixture_echo())
    session.deliver(session.snapshot.inboxes["client"].timeouts[0].id)
    (ping,) = session.snapshot.inboxes["server"].messages
    session.deliver(ping.id)
    (pong,) = session.snapshot.inboxes["client"].messages
    session.deliver(pong.id)
    return session


def test_root_only_diagram_is_one_layer_of_name_boxes():
    session = loopback_session(fixture_echo())
    dot = to_dot(session.tree, session.tree.root)
    assert dot.startswith("digraph spacetime {")
    assert boxes(dot) == {("client", 0): "client", ("server", 0): "server"}
    assert message_edges(dot) == []
    assert "rank = same" in dot
    assert "->" not in dot  # no events, no lane edges yet
    session.close()


def test_ping_pong_has_exactly_two_message_edges():
    session = ping_pong_session()
    dot = to_dot(session.tree, session.cursor)
    edges = message_edges(dot)
    assert [(e["src"], int(e["src_layer"]), e["dst"], int(e["dst_layer"]),
             e["label"]) for e in edges] == [
        ("client", 1, "server", 2, "ping"),
        ("server", 2, "client", 3, "pong"),
    ]
    # the fired timeout is drawn as a labeled box on the client lane
    assert boxes(dot)[("client", 1)] == "send"
    session.close()


def test_every_message_edge_points_strictly_forward():
    session = ping_pong_session()
    dot = to_dot(session.tree, session.cursor)
    for e in message_edges(dot):
        assert int(e["src_layer"]) < int(e["dst_layer"])
    session.close()


def test_lane_edges_connect_consecutive_layers():
    session = ping_pong_session()
    dot = to_dot(session.tree, session.cursor)
    lane_edges = [line for line in dot.splitlines() if "dir = none" in line]
    # two lanes, three events: 3 segments per lane
    assert len(lane_edges) == 6
    assert '  "client@0" -> "client@1" [dir = none, weight = 1000];' in dot
    # one rank group per layer keeps lanes aligned
    assert dot.count("rank = same") == 4
    session.close()


def test_broadcast_fans_out_from_one_anchor():
    session = loopback_session(fixture_toy_election(3))
    session.deliver(session.snapshot.inboxes["S1"].timeouts[0].id)
    for peer in ("S2", "S3"):
        (rv,) = session.snapshot.inboxes[peer].messages
        session.deliver(rv.id)
    dot = to_dot(session.tree, session.cursor)
    edges = message_edges(dot)
    assert len(edges) == 2
    assert all(e["label"] == "RV" for e in edges)
    assert {(e["src"], e["src_layer"]) for e in edges} == {("S1", "1")}
    assert {e["dst"] for e in edges} == {"S2", "S3"}
    assert boxes(dot)[("S1", 1)] == "E"
    session.close()


def test_drop_is_a_crossed_out_delivery():
    session = loopback_session(fixture_echo())
    session.deliver(session.snapshot.inboxes["client"].timeouts[0].id)
    (ping,) = session.snapshot.inboxes["server"].messages
    session.drop(ping.id)
    dot = to_dot(session.tree, session.cursor)
    (edge,) = message_edges(dot)
    assert (edge["src"], edge["dst"], edge["label"]) == ("client", "server", "ping")
    assert boxes(dot)[("server", int(edge["dst_layer"]))] == "✕"
    session.close()


def test_duplicate_copies_share_the_send_anchor():
    session = loopback_session(fixture_echo())
    session.deliver(session.snapshot.inboxes["client"].timeouts[0].id)
    (ping,) = session.snapshot.inboxes["server"].messages
    session.duplicate(ping.id)
    first, second = session.snapshot.inboxes["server"].messages
    session.deliver(first.id)
    session.deliver(second.id)
    dot = to_dot(session.tree, session.cursor)
    edges = [e for e in message_edges(dot) if e["label"] == "ping"]
    assert len(edges) == 2
    assert {(e["src"], e["src_layer"]) for e in edges} == {("client", "1")}
    assert sorted(int(e["dst_layer"]) for e in edges) == [3, 4]
    session.close()


def test_in_flight_messages_draw_no_edge():
    session = loopback_session(fixture_echo())
    session.deliver(session.snapshot.inboxes["client"].timeouts[0].id)
    dot = to_dot(session.tree, session.cursor)  # ping still undelivered
    assert message_edges(dot) == []
    session.close()


def test_output_is_deterministic():
    session = ping_pong_session()
    assert to_dot(session.tree, session.cursor) == to_dot(session.tree, session.cursor)
    session.close()


def test_mid_path_export_ignores_later_branches():
    session = ping_pong_session()
    path = session.tree.path_nodes(session.cursor)
    mid = path[1].id
    dot = to_dot(session.tree, mid)
    assert message_edges(dot) == []
    assert boxes(dot)[("client", 1)] == "send"
    session.close()

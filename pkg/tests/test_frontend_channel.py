import http.client

import pytest

from switchboard.frontend import FrontendServer
from switchboard.fixtures import loopback_session
from switchboard.fixtures.echo import fixture_echo

from wsclient import ECHO_RUN, WsClient, message_id, timeout_id


@pytest.fixture
def stack():
    session = loopback_session(fixture_echo())
    server = FrontendServer(session, port=0)
    yield session, server
    server.close()
    session.close()


class TestChannel:
    def test_initial_update_carries_the_whole_world(self, stack):
        _, server = stack
        ws = WsClient(server.port)
        update = ws.recv_update()
        assert update["cursor"] == 0
        assert [n["id"] for n in update["historyDelta"]] == [0]
        assert update["historyDelta"][0]["label"] == "start"
        assert update["snapshot"]["states"] == {"client": {"pongs": 0, "sent": 0},
                                                "server": {"pings": 0}}
        assert "error" not in update
        ws.close()

    def test_deliver_commands_advance_the_session(self, stack):
        session, server = stack
        ws = WsClient(server.port)
        update = ws.recv_update()

        update = ws.roundtrip({"cmd": "deliverTimeout", "id": timeout_id(update)})
        assert update["cursor"] == 1
        assert [n["id"] for n in update["historyDelta"]] == [1]
        assert update["snapshot"]["states"]["client"]["sent"] == 1

        ping = message_id(update, "server")
        update = ws.roundtrip({"cmd": "deliverMessage", "id": ping})
        assert update["snapshot"]["states"]["server"]["pings"] == 1
        assert session.cursor == 2
        ws.close()

    def test_drop_and_duplicate_commands(self, stack):
        _, server = stack
        ws = WsClient(server.port)
        update = ws.recv_update()
        update = ws.roundtrip({"cmd": "deliverTimeout", "id": timeout_id(update)})
        ping = message_id(update, "server")

        update = ws.roundtrip({"cmd": "duplicateMessage", "id": ping})
        msgs = update["snapshot"]["inboxes"]["server"]["messages"]
        assert len(msgs) == 2 and msgs[0]["body"] == msgs[1]["body"]

        update = ws.roundtrip({"cmd": "dropMessage", "id": ping})
        msgs = update["snapshot"]["inboxes"]["server"]["messages"]
        assert len(msgs) == 1 and msgs[0]["id"] != ping
        ws.close()

    def test_reset_to_moves_cursor_back(self, stack):
        _, server = stack
        ws = WsClient(server.port)
        update = ws.recv_update()
        root_snapshot = update["snapshot"]
        update = ws.roundtrip({"cmd": "deliverTimeout", "id": timeout_id(update)})
        update = ws.roundtrip({"cmd": "resetTo", "historyNodeId": 0})
        assert update["cursor"] == 0
        assert update["historyDelta"] == []
        assert update["snapshot"] == root_snapshot
        ws.close()

    def test_wrong_kind_is_rejected_with_an_error_update(self, stack):
        session, server = stack
        ws = WsClient(server.port)
        update = ws.recv_update()
        tid = timeout_id(update)
        update = ws.roundtrip({"cmd": "deliverMessage", "id": tid})
        assert "not a deliverable message" in update["error"]
        assert update["cursor"] == 0
        assert session.cursor == 0  # nothing happened
        # the session is still usable afterwards
        update = ws.roundtrip({"cmd": "deliverTimeout", "id": tid})
        assert update["cursor"] == 1
        ws.close()

    def test_stale_id_after_reset_is_rejected(self, stack):
        _, server = stack
        ws = WsClient(server.port)
        update = ws.recv_update()
        update = ws.roundtrip({"cmd": "deliverTimeout", "id": timeout_id(update)})
        ping = message_id(update, "server")
        ws.roundtrip({"cmd": "resetTo", "historyNodeId": 0})
        update = ws.roundtrip({"cmd": "deliverMessage", "id": ping})
        assert "error" in update
        ws.close()

    @pytest.mark.parametrize("payload", [
        b'{"cmd":"selfDestruct"}',
        b'{"cmd":"deliverMessage","id":"five"}',
        b'{"cmd":"resetTo"}',
        b'[1,2,3]',
        b'not json at all',
        b'{"cmd":"loadTrace","path":7}',
    ])
    def test_bad_commands_produce_error_updates(self, stack, payload):
        _, server = stack
        ws = WsClient(server.port)
        ws.recv_update()
        ws.send_frame(0x1, payload)
        update = ws.recv_update()
        assert update["error"]
        assert update["cursor"] == 0
        ws.close()

    def test_load_trace_command(self, stack, tmp_path):
        _, server = stack
        path = tmp_path / "echo.trace"
        path.write_text(ECHO_RUN)
        ws = WsClient(server.port)
        ws.recv_update()
        ws.send({"cmd": "loadTrace", "path": str(path)})
        # one update per replayed event; the last one lands on the leaf
        update = ws.recv_update()
        while update["cursor"] != 3:
            update = ws.recv_update()
        assert update["snapshot"]["states"] == {"client": {"pongs": 1, "sent": 1},
                                                "server": {"pings": 1}}
        ws.close()

    def test_updates_are_broadcast_to_every_client(self, stack):
        _, server = stack
        first = WsClient(server.port)
        second = WsClient(server.port)
        u1 = first.recv_update()
        second.recv_update()
        first.send({"cmd": "deliverTimeout", "id": timeout_id(u1)})
        assert first.recv_update()["cursor"] == 1
        assert second.recv_update()["cursor"] == 1
        first.close()
        second.close()

    def test_late_joiner_receives_accumulated_history(self, stack):
        session, server = stack
        ws = WsClient(server.port)
        update = ws.recv_update()
        ws.roundtrip({"cmd": "deliverTimeout", "id": timeout_id(update)})

        late = WsClient(server.port)
        update = late.recv_update()
        assert [n["id"] for n in update["historyDelta"]] == [0, 1]
        assert update["cursor"] == session.cursor
        ws.close()
        late.close()

    def test_ping_gets_ponged(self, stack):
        _, server = stack
        ws = WsClient(server.port)
        ws.recv_update()
        ws.send_frame(0x9, b"hi")
        opcode, payload = ws.recv_frame()
        assert (opcode, payload) == (0xA, b"hi")
        ws.close()


class TestAssets:
    def get(self, port, path):
        conn = http.client.HTTPConnection("127.0.0.1", port, timeout=10)
        conn.request("GET", path)
        response = conn.getresponse()
        body = response.read()
        conn.close()
        return response, body

    @pytest.fixture
    def asset_server(self, tmp_path):
        (tmp_path / "index.html").write_text("<!doctype html><title>debugger</title>")
        (tmp_path / "app.js").write_text("console.log('ready');")
        session = loopback_session(fixture_echo())
        server = FrontendServer(session, port=0, asset_dir=str(tmp_path))
        yield server
        server.close()
        session.close()

    def test_root_serves_index(self, asset_server):
        response, body = self.get(asset_server.port, "/")
        assert response.status == 200
        assert response.getheader("Content-Type").startswith("text/html")
        assert b"debugger" in body

    def test_js_content_type(self, asset_server):
        response, body = self.get(asset_server.port, "/app.js")
        assert response.status == 200
        assert response.getheader("Content-Type").startswith("text/javascript")

    def test_missing_file_404(self, asset_server):
        response, _ = self.get(asset_server.port, "/nope.css")
        assert response.status == 404

    def test_path_traversal_is_blocked(self, asset_server):
        conn = http.client.HTTPConnection("127.0.0.1", asset_server.port, timeout=10)
        conn.putrequest("GET", "/../pyproject.toml", skip_host=True,
                        skip_accept_encoding=True)
        conn.putheader("Host", "x")
        conn.endheaders()
        response = conn.getresponse()
        assert response.status == 404
        conn.close()

    def test_post_rejected(self, asset_server):
        conn = http.client.HTTPConnection("127.0.0.1", asset_server.port, timeout=10)
        conn.request("POST", "/", body=b"x")
        assert conn.getresponse().status == 405
        conn.close()

    def test_bundled_ui_is_served_by_default(self):
        session = loopback_session(fixture_echo())
        server = FrontendServer(session, port=0)
        try:
            response, body = self.get(server.port, "/")
            assert response.status == 200
            assert b"switchboard" in body
            for asset in ("/main.js", "/app.js", "/store.js", "/style.css"):
                response, _ = self.get(server.port, asset)
                assert response.status == 200, asset
        finally:
            server.close()
            session.close()

    def test_headless_serves_no_assets_but_keeps_the_channel(self, tmp_path):
        (tmp_path / "index.html").write_text("hello")
        session = loopback_session(fixture_echo())
        server = FrontendServer(session, port=0, serve_assets=False,
                                asset_dir=str(tmp_path))
        try:
            response, _ = self.get(server.port, "/")
            assert response.status == 404
            ws = WsClient(server.port)
            assert ws.recv_update()["cursor"] == 0
            ws.close()
        finally:
            server.close()
            session.close()

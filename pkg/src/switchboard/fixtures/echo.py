"""Minimal two-node smoke-test system: a client pings, a server pongs."""

from ..shim import Node, standalone_main
from . import Fixture, InvariantPredicate


class EchoClient(Node):
    def on_start(self, ctx):
        ctx.state = {"sent": 0, "pongs": 0}
        ctx.set_timeout("send", {})

    def on_timeout(self, ctx, type, body):
        if type == "send":
            ctx.state["sent"] += 1
            ctx.send("server", "ping", {"n": ctx.state["sent"]})
            ctx.set_timeout("send", {})  # keep pinging; the user paces it

    def on_message(self, ctx, sender, type, body):
        if type == "pong":
            ctx.state["pongs"] += 1


class EchoServer(Node):
    def on_start(self, ctx):
        ctx.state = {"pings": 0}

    def on_message(self, ctx, sender, type, body):
        if type == "ping":
            ctx.state["pings"] += 1
            ctx.send(sender, "pong", body)


def _pongs_le_pings(snapshot):
    return snapshot.states["client"]["pongs"] <= snapshot.states["server"]["pings"]


def fixture_echo():
    return Fixture(
        name="echo",
        nodes=(EchoClient("client"), EchoServer("server")),
        invariants=(InvariantPredicate("pongs_le_pings", _pongs_le_pings),))


if __name__ == "__main__":
    raise SystemExit(standalone_main(fixture_echo().nodes,
                                     description="echo demo system"))

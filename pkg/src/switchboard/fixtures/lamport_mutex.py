"""Mutual exclusion with logical clocks and a totally ordered request queue.

Each node wants the critical section once. A "want" timeout stamps and
broadcasts a request; peers answer with a later clock value; a node enters
when its own request is the queue minimum and every peer has answered it.
Leaving (the "exit" timeout) broadcasts a release that unblocks the next
request in timestamp order.

A peer that itself holds an earlier request (ordered by [clock, name])
defers its reply until it has left the section. Without that rule two
requests with equal clocks can both be granted when the network reorders
messages: this debugger makes no channel-order promises, so the fixture
cannot lean on them.

The broken variant drops the wait for replies altogether, so a node enters
as soon as its own request is the minimum of whatever its local queue
happens to contain.
"""

from ..shim import Node, standalone_main
from . import Fixture, InvariantPredicate


class MutexNode(Node):
    def __init__(self, name, peers, broken=False):
        super().__init__(name)
        self.peers = tuple(p for p in peers if p != name)
        self.broken = broken

    def on_start(self, ctx):
        ctx.state = {"clock": 0, "wants": False, "inCS": False, "done": False,
                     "req": None, "queue": [], "replies": [], "deferred": []}
        ctx.set_timeout("want", {})

    def _tick(self, s, seen_ts=0):
        s["clock"] = max(s["clock"], seen_ts) + 1

    def on_timeout(self, ctx, type, body):
        s = ctx.state
        if type == "want":
            self._tick(s)
            s["wants"] = True
            s["req"] = [s["clock"], self.name]
            s["queue"] = sorted(s["queue"] + [s["req"]])
            for peer in self.peers:
                ctx.send(peer, "request", {"ts": s["req"][0]})
            self._maybe_enter(ctx)
        elif type == "exit":
            self._tick(s)
            s["inCS"] = False
            s["wants"] = False
            s["done"] = True
            s["queue"] = [r for r in s["queue"] if r[1] != self.name]
            for peer in self.peers:
                ctx.send(peer, "release", {"ts": s["clock"]})
            for peer in s["deferred"]:
                ctx.send(peer, "reply", {"ts": s["clock"]})
            s["deferred"] = []

    def on_message(self, ctx, sender, type, body):
        s = ctx.state
        self._tick(s, body["ts"])
        if type == "request":
            s["queue"] = sorted(s["queue"] + [[body["ts"], sender]])
            if s["wants"] and s["req"] < [body["ts"], sender]:
                s["deferred"].append(sender)  # answer once out of the section
            else:
                ctx.send(sender, "reply", {"ts": s["clock"]})
        elif type == "reply":
            if s["wants"] and sender not in s["replies"]:
                s["replies"].append(sender)
        elif type == "release":
            s["queue"] = [r for r in s["queue"] if r[1] != sender]
        self._maybe_enter(ctx)

    def _maybe_enter(self, ctx):
        s = ctx.state
        if not s["wants"] or s["inCS"] or s["done"]:
            return
        if not s["queue"] or s["queue"][0] != s["req"]:
            return
        if not self.broken and len(s["replies"]) < len(self.peers):
            return
        s["inCS"] = True
        ctx.set_timeout("exit", {})


def _mutual_exclusion(snapshot):
    holders = [n for n, s in snapshot.states.items() if s.get("inCS")]
    return len(holders) <= 1


def fixture_lamport_mutex(n, broken=False):
    """n processes P1..Pn, each wanting the critical section once."""
    if n < 2:
        raise ValueError("mutex fixture needs at least 2 nodes")
    names = [f"P{i}" for i in range(1, n + 1)]
    nodes = tuple(MutexNode(name, names, broken=broken) for name in names)
    return Fixture(
        name=("mutex-broken" if broken else "mutex") + f":{n}",
        nodes=nodes,
        invariants=(InvariantPredicate("mutual_exclusion", _mutual_exclusion),))


if __name__ == "__main__":
    import argparse
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--broken", action="store_true")
    args, rest = parser.parse_known_args()
    fixture = fixture_lamport_mutex(args.n, broken=args.broken)
    raise SystemExit(standalone_main(fixture.nodes, rest,
                                     description="logical-clock mutex demo system"))

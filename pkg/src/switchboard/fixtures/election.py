"""Term-based leader election over a fixed member set.

An election timeout turns a node into a candidate for a fresh term; it
broadcasts vote requests (RV), members vote at most once per term (V), and
a candidate holding a majority of the configuration marks itself leader.
The five-node variant keeps S5 outside the configuration: it is visible
and has its own timeout, but candidates only canvass the four members.
"""

from ..shim import Node, standalone_main
from . import Fixture, InvariantPredicate


class ElectionNode(Node):
    def __init__(self, name, members):
        super().__init__(name)
        self.members = tuple(members)  # who candidates broadcast to

    def on_start(self, ctx):
        ctx.state = {"term": 0, "votedFor": None, "leader": False, "votes": []}
        ctx.set_timeout("E", {})

    def on_timeout(self, ctx, type, body):
        if type != "E":
            return
        s = ctx.state
        s["term"] += 1
        s["votedFor"] = self.name
        s["leader"] = False
        s["votes"] = [self.name]
        for peer in self.members:
            if peer != self.name:
                ctx.send(peer, "RV", {"term": s["term"]})
        self._maybe_win(s)

    def on_message(self, ctx, sender, type, body):
        s = ctx.state
        if type == "RV":
            term = body["term"]
            if term > s["term"]:
                s["term"] = term
                s["votedFor"] = sender
                s["leader"] = False
                s["votes"] = []
                granted = True
            elif term == s["term"] and s["votedFor"] in (None, sender):
                s["votedFor"] = sender
                granted = True
            else:
                granted = False
            ctx.send(sender, "V", {"term": term, "granted": granted})
        elif type == "V":
            if (body["granted"] and body["term"] == s["term"]
                    and s["votedFor"] == self.name):
                if sender not in s["votes"]:
                    s["votes"].append(sender)
                self._maybe_win(s)

    def _maybe_win(self, s):
        if len(s["votes"]) * 2 > len(self.members):
            s["leader"] = True


def _one_leader_per_term(snapshot):
    leaders = set()
    for state in snapshot.states.values():
        if state.get("leader"):
            if state["term"] in leaders:
                return False
            leaders.add(state["term"])
    return True


def fixture_toy_election(n):
    """n nodes S1..Sn; with n=5, S5 starts outside the member set."""
    if n < 3:
        raise ValueError("election fixture needs at least 3 nodes")
    names = [f"S{i}" for i in range(1, n + 1)]
    members = names[:4] if n == 5 else names
    nodes = tuple(ElectionNode(name, members) for name in names)
    return Fixture(
        name=f"election:{n}",
        nodes=nodes,
        invariants=(InvariantPredicate("one_leader_per_term", _one_leader_per_term),))


if __name__ == "__main__":
    import argparse
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--n", type=int, default=5)
    args, rest = parser.parse_known_args()
    raise SystemExit(standalone_main(fixture_toy_election(args.n).nodes, rest,
                                     description="toy election demo system"))

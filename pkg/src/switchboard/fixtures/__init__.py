"""Deterministic example systems used for demos and as the test corpus."""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class InvariantPredicate:
    """A named, pure check over a single system snapshot (True = holds)."""

    name: str
    check: callable

    def holds(self, snapshot):
        return bool(self.check(snapshot))


@dataclass(frozen=True)
class Fixture:
    """A runnable example system: node definitions plus its safety invariants."""

    name: str
    nodes: tuple
    invariants: tuple = ()

    def node_names(self):
        return sorted(n.name for n in self.nodes)


def loopback_session(fixture, frame_log=None):
    """Start a session over the fixture's nodes running in-process."""
    from ..engine import start_session
    from ..transport import loopback_handles

    return start_session(loopback_handles(fixture.nodes, frame_log))


def get_fixture(name):
    """Look up a fixture by CLI-friendly name, e.g. "echo" or "mutex:3"."""
    from .echo import fixture_echo
    from .election import fixture_toy_election
    from .lamport_mutex import fixture_lamport_mutex

    kind, _, arg = name.partition(":")
    if kind == "echo":
        return fixture_echo()
    if kind == "election":
        return fixture_toy_election(int(arg or 5))
    if kind == "mutex":
        return fixture_lamport_mutex(int(arg or 3))
    if kind == "mutex-broken":
        return fixture_lamport_mutex(int(arg or 3), broken=True)
    raise ValueError(f"unknown fixture {name!r}")

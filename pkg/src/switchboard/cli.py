"""Command line entry point.

Two modes. The default serves a debugging session: a shim endpoint for
nodes, a frontend endpoint for browsers, optional trace replay on startup
and trace/diagram export on shutdown. `--explore` instead runs the bounded
exhaustive explorer over a built-in fixture and prints any counterexample
trace to stdout (commentary goes to stderr, so redirection yields a
loadable trace file).
"""

import argparse
import os
import signal
import sys
import threading

from . import spacetime, tracefile, wire
from .engine import start_session
from .errors import ShimError, SwitchboardError
from .fixtures import get_fixture, loopback_session
from .frontend import FrontendServer
from .transport import NodeServer

HOST = "127.0.0.1"
NODE_PORT_ENV = "SWITCHBOARD_NODE_PORT"
UI_PORT_ENV = "SWITCHBOARD_UI_PORT"


def build_parser():
    parser = argparse.ArgumentParser(
        prog="switchboard",
        description="Interactive debugger for message-passing systems.")
    parser.add_argument(
        "--nodes", metavar="A,B,C",
        help="comma-separated names of nodes expected to register over TCP")
    parser.add_argument(
        "--fixture", metavar="NAME",
        help='run a built-in example in-process instead, e.g. "echo", '
             '"election:5", "mutex:3", "mutex-broken:2"')
    parser.add_argument(
        "--node-port", type=int, metavar="PORT",
        help=f"shim endpoint port (default {wire.NODE_PORT}, "
             f"or ${NODE_PORT_ENV})")
    parser.add_argument(
        "--ui-port", type=int, metavar="PORT",
        help=f"frontend endpoint port (default {wire.UI_PORT}, "
             f"or ${UI_PORT_ENV})")
    parser.add_argument(
        "--trace", metavar="FILE", help="replay this trace on startup")
    parser.add_argument(
        "--record", metavar="FILE",
        help="write the cursor path as a trace on exit")
    parser.add_argument(
        "--export-dot", metavar="FILE",
        help="write a space-time diagram of the cursor path on exit")
    parser.add_argument(
        "--headless", action="store_true",
        help="serve the command socket only, no UI assets")
    parser.add_argument(
        "--explore", metavar="FIXTURE",
        help="search a fixture for invariant violations, then exit")
    parser.add_argument(
        "--max-depth", type=int, metavar="N",
        help="event depth bound for --explore (default 12)")
    parser.add_argument(
        "--prune-visited", action="store_true",
        help="skip states already expanded during --explore")
    parser.add_argument(
        "--allow-dup-drop-in-explore", action="store_true",
        help="let --explore schedule message drops and duplications too")
    return parser


def _port(parser, flag_value, env_name, default):
    """Explicit flag wins, then the environment, then the default."""
    if flag_value is not None:
        return flag_value
    raw = os.environ.get(env_name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        parser.error(f"{env_name} must be an integer, got {raw!r}")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    explore_only = ("--max-depth", args.max_depth is not None), \
                   ("--prune-visited", args.prune_visited), \
                   ("--allow-dup-drop-in-explore", args.allow_dup_drop_in_explore)
    if args.explore is None:
        for flag, given in explore_only:
            if given:
                parser.error(f"{flag} requires --explore")
        if (args.nodes is None) == (args.fixture is None):
            parser.error("pass exactly one of --nodes or --fixture")
    elif args.nodes or args.fixture or args.trace or args.headless:
        parser.error("--explore cannot be combined with serving flags")

    try:
        if args.explore is not None:
            return _run_explore(args)
        return _run_server(parser, args)
    except SwitchboardError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
    except OSError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1


def _run_explore(args):
    fixture = get_fixture(args.explore)
    if not fixture.invariants:
        raise SwitchboardError(f"fixture {args.explore!r} has no invariants")
    invariant = fixture.invariants[0]
    depth = args.max_depth if args.max_depth is not None else 12
    print(f"exploring {args.explore} to depth {depth} "
          f"(invariant: {invariant.name})", file=sys.stderr)
    visited = []
    trace = tracefile.explore(
        lambda: loopback_session(fixture), invariant, depth,
        allow_dup_drop=args.allow_dup_drop_in_explore,
        prune_visited=args.prune_visited, collect=visited)
    if trace is None:
        print(f"no violation within depth {depth} "
              f"({len(visited)} states visited)", file=sys.stderr)
        return 0
    print(f"{invariant.name} violated after {len(trace.steps)} steps",
          file=sys.stderr)
    sys.stdout.write(trace.to_text())
    if args.record:
        with open(args.record, "w", encoding="utf-8") as out:
            out.write(trace.to_text())
        print(f"counterexample written to {args.record}", file=sys.stderr)
    return 0


def _await_registration(server, names, shutdown):
    """wait_for with short timeouts so a signal can interrupt the wait."""
    while not shutdown.is_set():
        try:
            return server.wait_for(names, timeout=0.2)
        except ShimError:
            continue
    return None


def _run_server(parser, args):
    node_port = _port(parser, args.node_port, NODE_PORT_ENV, wire.NODE_PORT)
    ui_port = _port(parser, args.ui_port, UI_PORT_ENV, wire.UI_PORT)
    if node_port == ui_port:
        parser.error(f"node port and ui port must differ (both {node_port})")

    shutdown = threading.Event()
    for signum in (signal.SIGINT, signal.SIGTERM):
        signal.signal(signum, lambda *_: shutdown.set())

    node_server = None
    session = None
    frontend = None
    try:
        if args.fixture is not None:
            fixture = get_fixture(args.fixture)
            session = loopback_session(fixture)
            print(f"fixture {args.fixture} started "
                  f"({len(session.names)} nodes)", flush=True)
        else:
            names = sorted(n.strip() for n in args.nodes.split(",") if n.strip())
            if not names:
                parser.error("--nodes needs at least one name")
            node_server = NodeServer(HOST, node_port)
            print(f"nodes on {HOST}:{node_server.port}", flush=True)
            print("waiting for: " + ", ".join(names), flush=True)
            handles = _await_registration(node_server, names, shutdown)
            if handles is None:
                return 0  # interrupted before the cluster assembled
            session = start_session(handles)
            print("session started", flush=True)

        frontend = FrontendServer(session, HOST, ui_port,
                                  serve_assets=not args.headless)
        print(f"ui on http://{HOST}:{frontend.port}"
              + (" (headless: command socket only)" if args.headless else ""),
              flush=True)

        if args.trace:
            leaf = tracefile.load_trace(args.trace, session)
            depth = len(session.tree.path_to_root(leaf)) - 1  # minus start
            print(f"trace replayed, cursor at depth {depth}", flush=True)

        print("ready", flush=True)
        while not shutdown.wait(0.5):
            pass

        if args.record:
            tracefile.write_trace(session.tree, session.cursor, args.record)
            print(f"trace written to {args.record}", flush=True)
        if args.export_dot:
            with open(args.export_dot, "w", encoding="utf-8") as out:
                out.write(spacetime.to_dot(session.tree, session.cursor))
            print(f"diagram written to {args.export_dot}", flush=True)
        return 0
    finally:
        if frontend is not None:
            frontend.close()
        if session is not None:
            session.close()
        if node_server is not None:
            node_server.close()


if __name__ == "__main__":
    sys.exit(main())

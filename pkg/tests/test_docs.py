"""Keep the docs honest: every byte-level example in them must be real."""

import pathlib
import re

from switchboard import tracefile
from switchboard.fixtures import loopback_session
from switchboard.fixtures.echo import fixture_echo

DOCS = pathlib.Path(__file__).resolve().parents[1] / "docs"
GOLDEN = pathlib.Path(__file__).resolve().parent / "data" / "echo_transcript.txt"


def fenced_blocks(path):
    text = path.read_text()
    return re.findall(r"```(?:text|json)?\n(.*?)```", text, flags=re.DOTALL)


def test_protocol_doc_quotes_the_golden_transcript():
    blocks = fenced_blocks(DOCS / "protocol.md")
    transcript = GOLDEN.read_text()
    assert any(block == transcript for block in blocks)


def test_protocol_doc_hex_dump_matches_the_register_frame():
    text = (DOCS / "protocol.md").read_text()
    hex_bytes = re.findall(r"^((?:[0-9a-f]{2} )+[0-9a-f]{2})", text, re.MULTILINE)
    raw = bytes.fromhex("".join(hex_bytes).replace(" ", ""))
    assert raw == b'{"msgtype":"register","name":"client"}\n'


def test_trace_doc_examples_load_and_round_trip():
    blocks = [b for b in fenced_blocks(DOCS / "trace-format.md")
              if b.startswith('{"nodes":["client","server"]')
              and "DELIVER" in b]
    assert len(blocks) == 2
    for text in blocks:
        session = loopback_session(fixture_echo())
        try:
            leaf = tracefile.load_trace(tracefile.Trace.from_text(text), session)
            again = tracefile.trace_from_history(session.tree, leaf).to_text()
            assert again == text
        finally:
            session.close()

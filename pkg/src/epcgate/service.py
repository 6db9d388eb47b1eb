"""Line protocol resolver service.

One UTF-8 request per ``\\n``-terminated line, one response line per request::

    MAP source=uii|tid [mode=..] [netid=..] <record fields> [tag=<key>]
    RESOLVE address=<ipv6>
    REVERSE tag=<key>
    STATS
    QUIT

Responses start with ``OK `` or ``ERR `` and never contain tabs.
"""

import collections
import socketserver
import statistics
import threading
import time

from .errors import (
    AddressCollision,
    DuplicateTagKey,
    EpcGateError,
    NotFound,
)
from .mapper import MappingMode, format_ipv6, parse_netid
from .records import RECORD_KEYS, RequestError, map_record, parse_kv
from .registry import Registry, RegistryEntry

MAP_KEYS = frozenset(RECORD_KEYS) - {"kind"} | {"source", "mode", "netid"}
TIMING_WINDOW = 100_000


def render_error(exc):
    if isinstance(exc, RequestError):
        return f"ERR parse {exc.detail}"
    if isinstance(exc, NotFound):
        return "ERR not-found"
    if isinstance(exc, AddressCollision):
        return f"ERR collision {exc.existing_key}"
    detail = exc.wire_detail()
    return f"ERR {exc.name} {detail}" if detail else f"ERR {exc.name}"


class Resolver:
    """Protocol state shared by all connections.

    Mapping runs unlocked; registry mutation, counters and persistence are
    serialized on ``lock``.
    """

    def __init__(self, registry=None, registry_path=None, default_netid=None):
        self.registry = registry if registry is not None else Registry()
        self.registry_path = registry_path
        self.default_netid = default_netid
        self.lock = threading.Lock()
        self.maps = 0
        self.collisions = 0
        self._map_us = collections.deque(maxlen=TIMING_WINDOW)

    def handle_line(self, line):
        """Return ``(response, close)`` for one request line."""
        tokens = line.split()
        if not tokens:
            return "ERR parse empty-request", False
        verb, args = tokens[0], tokens[1:]
        try:
            if verb == "MAP":
                return self.handle_map(args), False
            if verb == "RESOLVE":
                return self.handle_resolve(args), False
            if verb == "REVERSE":
                return self.handle_reverse(args), False
            if verb == "STATS":
                if args:
                    raise RequestError(f"unexpected-argument={args[0]}")
                return self.handle_stats(), False
            if verb == "QUIT":
                return "OK bye", True
            return f"ERR parse unknown-verb={verb}", False
        except EpcGateError as exc:
            return render_error(exc), False

    def handle_map(self, args):
        fields = parse_kv(args, MAP_KEYS)
        if "source" not in fields:
            raise RequestError("missing-key=source")
        fields["kind"] = fields.pop("source")
        if fields["kind"] not in ("uii", "tid"):
            raise RequestError(f"source={fields['kind']}")
        mode_text = fields.pop("mode", MappingMode.CANONICAL.value)
        try:
            mode = MappingMode(mode_text)
        except ValueError:
            raise RequestError(f"mode={mode_text}") from None
        netid_text = fields.pop("netid", None) or self.default_netid
        if netid_text is None:
            raise RequestError("missing-key=netid")
        net_id = parse_netid(netid_text)

        started = time.perf_counter_ns()
        mapped = map_record(fields, net_id, mode)
        elapsed_us = (time.perf_counter_ns() - started) / 1000
        with self.lock:
            self.maps += 1
            self._map_us.append(elapsed_us)
            if mapped.tag_key is not None:
                self._register(RegistryEntry.from_mapped(mapped))
        return f"OK {format_ipv6(mapped.address)}"

    def _register(self, entry):
        before = len(self.registry)
        try:
            self.registry.register(entry)
        except (AddressCollision, DuplicateTagKey):
            self.collisions += 1
            raise
        if self.registry_path and len(self.registry) != before:
            self.registry.save(self.registry_path)

    def handle_resolve(self, args):
        fields = parse_kv(args, {"address"})
        if "address" not in fields:
            raise RequestError("missing-key=address")
        entry = self.registry.lookup_by_address(fields["address"])
        return f"OK tag={entry.tag_key} dispatch={entry.dispatch} mode={entry.mode}"

    def handle_reverse(self, args):
        fields = parse_kv(args, {"tag"})
        if "tag" not in fields:
            raise RequestError("missing-key=tag")
        entry = self.registry.lookup_by_tag(fields["tag"])
        return f"OK address={format_ipv6(entry.address)} dispatch={entry.dispatch} mode={entry.mode}"

    def handle_stats(self):
        with self.lock:
            median = round(statistics.median(self._map_us)) if self._map_us else 0
            return (
                f"OK entries={len(self.registry)} maps={self.maps} "
                f"collisions={self.collisions} median_map_us={median}"
            )

    def flush(self):
        if self.registry_path:
            with self.lock:
                self.registry.save(self.registry_path)


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        resolver = self.server.resolver
        for raw in self.rfile:
            try:
                line = raw.decode("utf-8").rstrip("\r\n")
            except UnicodeDecodeError:
                response, close = "ERR parse encoding", False
            else:
                response, close = resolver.handle_line(line)
            self.wfile.write(response.encode("utf-8") + b"\n")
            self.wfile.flush()
            if close:
                return


class ResolverServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, resolver):
        self.resolver = resolver
        super().__init__(address, _Handler)


def parse_listen(text):
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"--listen expects host:port, got {text!r}")
    return host.strip("[]") or "127.0.0.1", int(port)

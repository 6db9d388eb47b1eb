"""``epcgate`` command line.

Exit codes: 0 success, 1 usage, 2 input/codec error, 3 I/O, 4 collision,
5 benchmark bound exceeded. Data goes to stdout, diagnostics to stderr.
"""

import argparse
import signal
import statistics
import sys
import time

from .corpus import generate_mixed_records, generate_records
from .errors import (
    AddressCollision,
    CorruptLine,
    DuplicateOnLoad,
    DuplicateTagKey,
    EpcGateError,
    IsoSerialUnavailable,
    NotFound,
)
from .mapper import MappingMode, format_ipv6, parse_netid
from .memory import parse_tag_dumps, read_toggle
from .records import RECORD_KEYS, map_record, parse_kv
from .registry import Registry, RegistryEntry
from .service import Resolver, ResolverServer, parse_listen

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_IO, EXIT_COLLISION, EXIT_BOUND = range(6)

BENCH_BOUND_MS = 10.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _diag(text):
    print(text, file=sys.stderr)


def _describe(exc):
    if isinstance(exc, (CorruptLine, DuplicateOnLoad)):
        return f"{exc.name} line={exc.lineno}: {exc.reason}"
    detail = exc.wire_detail()
    return f"{exc.name} {detail}: {exc}" if detail else f"{exc.name}: {exc}"


def _load_registry(path, missing_ok=False):
    try:
        return Registry.load(path)
    except FileNotFoundError:
        if missing_ok:
            return Registry()
        raise


def cmd_map(args):
    fields = {"kind": args.source}
    for key in ("toggle", "epc", "epcform", "serial", "radix", "afi", "mb01", "mb10", "tag"):
        value = getattr(args, key)
        if value is not None:
            fields[key] = value
    mapped = map_record(fields, parse_netid(args.netid), MappingMode(args.mode))
    print(format_ipv6(mapped.address, suffix_128=not args.plain))
    return EXIT_OK


def _dump_record(key, memory):
    """Batch record fields for one tag dump block."""
    if memory.uii is not None and read_toggle(memory.uii) == 0:
        return {"kind": "uii", "mb01": memory.uii.to_hex(), "tag": key}
    if memory.tid is not None:
        return {"kind": "tid", "mb10": memory.tid.to_hex(), "tag": key}
    # ISO serials are never carved out of raw MB01 bytes
    raise IsoSerialUnavailable(f"tag {key}: toggle 1 UII and no MB10 bank")


def _iter_batch(lines, fmt):
    """Yield ``(label, fields-or-exception)`` per record."""
    if fmt == "dump":
        for key, memory in parse_tag_dumps(lines):
            try:
                yield key, _dump_record(key, memory)
            except EpcGateError as exc:
                yield key, exc
        return
    index = 0
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        index += 1
        try:
            fields = parse_kv(line.split(), RECORD_KEYS)
        except EpcGateError as exc:
            yield str(index), exc
            continue
        yield fields.get("tag") or str(index), fields


def run_batch(lines, net_id, mode, registry=None, fmt="records"):
    """Map every record; returns (output lines, ok count, error count)."""
    out, ok, err = [], 0, 0
    for label, fields in _iter_batch(lines, fmt):
        try:
            if isinstance(fields, Exception):
                raise fields
            mapped = map_record(fields, net_id, mode)
            if registry is not None and mapped.tag_key is not None:
                registry.register(RegistryEntry.from_mapped(mapped))
        except EpcGateError as exc:
            out.append(f"{label}\tERR\t{exc.name}")
            err += 1
            continue
        out.append(f"{label}\t{format_ipv6(mapped.address)}\t{mapped.dispatch}")
        ok += 1
    return out, ok, err


def cmd_batch(args):
    net_id = parse_netid(args.netid)
    registry = _load_registry(args.registry, missing_ok=True) if args.registry else None
    with open(args.in_path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    out, ok, err = run_batch(lines, net_id, MappingMode(args.mode), registry, args.format)
    text = "".join(line + "\n" for line in out)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if registry is not None:
        registry.save(args.registry)
    _diag(f"{ok} ok / {err} err")
    return EXIT_OK


def cmd_gen(args):
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    if not 0.0 <= args.epc_ratio <= 1.0:
        raise UsageError("--epc-ratio must be within [0, 1]")
    text = "".join(line + "\n" for line in generate_records(args.count, args.seed, args.epc_ratio))
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def bench(iterations, mode, seed=0):
    """Time record -> formatted address over a mixed corpus; durations in microseconds."""
    mode = MappingMode(mode)
    net_id = parse_netid("2001:db8:0:1::/64")
    lines = generate_mixed_records(iterations, seed, include_tid=mode is MappingMode.CANONICAL)
    records = [parse_kv(line.split(), RECORD_KEYS) for line in lines]
    timings = []
    clock = time.perf_counter_ns
    for fields in records:
        started = clock()
        format_ipv6(map_record(fields, net_id, mode).address)
        timings.append((clock() - started) / 1000)
    return timings


def bench_report(timings, mode):
    ordered = sorted(timings)
    p99 = ordered[min(len(ordered) - 1, int(0.99 * len(ordered)))]
    median = statistics.median(ordered)
    return {
        "iterations": len(ordered),
        "mode": str(MappingMode(mode)),
        "min_us": f"{ordered[0]:.3f}",
        "median_us": f"{median:.3f}",
        "p99_us": f"{p99:.3f}",
        "bound_ms": f"{BENCH_BOUND_MS:g}",
        "status": "pass" if median < BENCH_BOUND_MS * 1000 else "fail",
    }


def cmd_bench(args):
    if args.iterations < 100:
        raise UsageError("--iterations must be >= 100")
    report = bench_report(bench(args.iterations, args.mode, args.seed), args.mode)
    for key, value in report.items():
        print(f"{key}={value}")
    return EXIT_OK if report["status"] == "pass" else EXIT_BOUND


def cmd_resolve(args):
    registry = _load_registry(args.registry)
    try:
        if args.address is not None:
            entry = registry.lookup_by_address(args.address)
        else:
            entry = registry.lookup_by_tag(args.tag)
    except NotFound:
        _diag("not-found")
        return EXIT_INPUT
    print(entry.to_line())
    return EXIT_OK


def _interrupt(signum, frame):
    raise KeyboardInterrupt


def cmd_serve(args):
    if args.netid_default is not None:
        parse_netid(args.netid_default)
    try:
        host, port = parse_listen(args.listen)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    registry = _load_registry(args.registry, missing_ok=True) if args.registry else Registry()
    resolver = Resolver(registry, args.registry, args.netid_default)
    try:
        server = ResolverServer((host, port), resolver)
    except OSError as exc:
        _diag(f"cannot listen on {args.listen}: {exc.strerror or exc}")
        return EXIT_IO
    previous = signal.signal(signal.SIGTERM, _interrupt)
    bound_host, bound_port = server.server_address[:2]
    _diag(f"listening on {bound_host}:{bound_port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        signal.signal(signal.SIGTERM, previous)
        server.server_close()
        resolver.flush()
        _diag("registry flushed" if args.registry else "stopped")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="epcgate", description="Map RFID tag identities to IPv6 addresses.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    modes = [m.value for m in MappingMode]

    p = sub.add_parser("map", help="map one tag identity")
    p.add_argument("--source", choices=["uii", "tid"], required=True)
    p.add_argument("--toggle")
    p.add_argument("--epc")
    p.add_argument("--epcform", choices=["decimal", "hex"])
    p.add_argument("--serial")
    p.add_argument("--radix")
    p.add_argument("--afi")
    p.add_argument("--mb01")
    p.add_argument("--mb10")
    p.add_argument("--tag")
    p.add_argument("--mode", choices=modes, default=MappingMode.CANONICAL.value)
    p.add_argument("--netid", required=True)
    p.add_argument("--plain", action="store_true", help="omit the ' /128' suffix")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("batch", help="map a file of records")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out")
    p.add_argument("--netid", required=True)
    p.add_argument("--mode", choices=modes, default=MappingMode.CANONICAL.value)
    p.add_argument("--registry")
    p.add_argument("--format", choices=["records", "dump"], default="records",
                   help="key=value records (default) or tag memory dump blocks")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("gen", help="generate a synthetic record file")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epc-ratio", type=float, default=0.5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time mappings against the 10 ms bound")
    p.add_argument("--iterations", type=int, default=10_000)
    p.add_argument("--mode", choices=modes, default=MappingMode.CANONICAL.value)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("resolve", help="look up a registry entry")
    p.add_argument("--registry", required=True)
    who = p.add_mutually_exclusive_group(required=True)
    who.add_argument("--address")
    who.add_argument("--tag")
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("serve", help="run the resolver service")
    p.add_argument("--listen", default="127.0.0.1:7341")
    p.add_argument("--registry")
    p.add_argument("--netid-default")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _diag(f"epcgate {args.command}: error: {exc}")
        return EXIT_USAGE
    except (AddressCollision, DuplicateTagKey) as exc:
        _diag(_describe(exc))
        return EXIT_COLLISION
    except EpcGateError as exc:
        _diag(_describe(exc))
        return EXIT_INPUT
    except OSError as exc:
        _diag(f"I/O error: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

import socket
import threading

import pytest

from epcgate import Registry, epc_input_to_bits, format_ipv6, map_from_uii, parse_netid, IsoSerial, MappingMode
from epcgate.service import Resolver, ResolverServer, parse_listen

FIG5_NET = "6789:1011:1213:1415"
MAP_ISO = f"MAP source=uii toggle=1 serial=9611860854 radix=10 mode=figure-compat netid={FIG5_NET}"
MAP_EPC = (
    "MAP source=uii toggle=0 epc=961186085415459865490825641692369 epcform=decimal "
    f"mode=figure-compat netid={FIG5_NET}"
)


def reply(resolver, line):
    return resolver.handle_line(line)[0]


def test_fig5_maps():
    r = Resolver()
    assert reply(r, MAP_ISO) == "OK 0000:0096:1186:0854:6789:1011:1213:1415"
    assert reply(r, MAP_EPC) == "OK 5490:8256:4169:2369:6789:1011:1213:1415"


def test_responses_match_library():
    net = parse_netid(FIG5_NET)
    iso = map_from_uii(1, IsoSerial("9611860854", 10), net, MappingMode.FIGURE_COMPAT)
    epc = map_from_uii(
        0, epc_input_to_bits("961186085415459865490825641692369", "decimal"), net, MappingMode.FIGURE_COMPAT
    )
    r = Resolver()
    assert reply(r, MAP_ISO) == "OK " + format_ipv6(iso.address)
    assert reply(r, MAP_EPC) == "OK " + format_ipv6(epc.address)


def test_invalid_digit_reports_column():
    r = Resolver()
    assert reply(r, "MAP source=uii toggle=1 serial=12G radix=16 netid=2001:db8:0:1::/64") == (
        "ERR InvalidDigit position=3"
    )


@pytest.mark.parametrize(
    "line, expected",
    [
        ("", "ERR parse empty-request"),
        ("HELLO", "ERR parse unknown-verb=HELLO"),
        ("MAP source=uii toggle=1 serial=1 netid=6789:1011:1213:1415 color=red", "ERR parse unknown-key=color"),
        ("MAP toggle=1 serial=1 netid=6789:1011:1213:1415", "ERR parse missing-key=source"),
        ("MAP source=uii toggle=1 serial=1", "ERR parse missing-key=netid"),
        ("MAP source=uii toggle=1 serial=1 netid=2001:db8::/48", "ERR PrefixNot64"),
        ("MAP source=uii toggle=1 serial=1 mode=fast netid=6789:1011:1213:1415", "ERR parse mode=fast"),
        ("MAP source=tid mb10=FF00 netid=6789:1011:1213:1415", "ERR UnknownAllocationClass ac=FF"),
        ("MAP source=tid mb10=E031AABBCCDDEEFF mode=figure-compat netid=6789:1011:1213:1415",
         "ERR CompatUnsupportedForTid"),
        ("RESOLVE address=::1", "ERR not-found"),
        ("RESOLVE", "ERR parse missing-key=address"),
        ("REVERSE tag=nope", "ERR not-found"),
    ],
)
def test_errors(line, expected):
    assert reply(Resolver(), line) == expected


def test_default_netid():
    r = Resolver(default_netid=FIG5_NET)
    assert reply(r, MAP_ISO.replace(f" netid={FIG5_NET}", "")).endswith("6789:1011:1213:1415")


def test_register_resolve_reverse():
    r = Resolver()
    assert reply(r, MAP_ISO + " tag=case-1").startswith("OK ")
    assert reply(r, "RESOLVE address=0000:0096:1186:0854:6789:1011:1213:1415") == (
        "OK tag=case-1 dispatch=uii-iso mode=figure-compat"
    )
    assert reply(r, "RESOLVE address=0:96:1186:854:6789:1011:1213:1415").startswith("OK tag=case-1")
    assert reply(r, "REVERSE tag=case-1") == (
        "OK address=0000:0096:1186:0854:6789:1011:1213:1415 dispatch=uii-iso mode=figure-compat"
    )


def test_stats():
    r = Resolver()
    assert reply(r, "STATS") == "OK entries=0 maps=0 collisions=0 median_map_us=0"
    reply(r, MAP_ISO + " tag=a")
    reply(r, MAP_EPC + " tag=b")
    stats = reply(r, "STATS")
    assert stats.startswith("OK entries=2 maps=2 collisions=0 median_map_us=")


def test_collision_on_wire():
    r = Resolver()
    net = "2001:db8:0:1::/64"
    # 68-bit 1||X and 64-bit X select the same interface id
    x = "0123456789ABCDEF"
    long_ = f"MAP source=uii toggle=0 epc=1{x} epcform=hex netid={net} tag=long"
    short = f"MAP source=uii toggle=0 epc={x} epcform=hex netid={net} tag=short"
    first = reply(r, long_)
    assert first == "OK 2001:0db8:0000:0001:0123:4567:89ab:cdef"
    assert reply(r, short) == "ERR collision long"
    assert reply(r, "STATS").startswith("OK entries=1 maps=2 collisions=1 ")


def test_persists_each_registration(tmp_path):
    path = tmp_path / "reg.tsv"
    r = Resolver(Registry(), str(path))
    reply(r, MAP_ISO + " tag=a")
    assert Registry.load(path).lookup_by_tag("a")


def test_parse_listen():
    assert parse_listen("127.0.0.1:7341") == ("127.0.0.1", 7341)
    assert parse_listen(":0") == ("127.0.0.1", 0)
    with pytest.raises(ValueError):
        parse_listen("localhost")


@pytest.fixture
def server():
    srv = ResolverServer(("127.0.0.1", 0), Resolver())
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield srv
    srv.shutdown()
    srv.server_close()


def _session(port, lines):
    with socket.create_connection(("127.0.0.1", port), timeout=5) as sock:
        fh = sock.makefile("rwb")
        out = []
        for line in lines:
            fh.write(line.encode() + b"\n")
            fh.flush()
            out.append(fh.readline().decode().rstrip("\n"))
        tail = fh.read()
    return out, tail


def test_socket_session(server):
    port = server.server_address[1]
    out, tail = _session(port, [MAP_ISO + " tag=a", "HELLO", MAP_EPC, "RESOLVE address=0000:0096:1186:0854:6789:1011:1213:1415", "QUIT"])
    assert out == [
        "OK 0000:0096:1186:0854:6789:1011:1213:1415",
        "ERR parse unknown-verb=HELLO",
        "OK 5490:8256:4169:2369:6789:1011:1213:1415",
        "OK tag=a dispatch=uii-iso mode=figure-compat",
        "OK bye",
    ]
    assert tail == b""
    assert all("\t" not in line for line in out)


def test_concurrent_clients(server):
    port = server.server_address[1]
    results = {}

    def client(i):
        lines = [f"MAP source=uii toggle=1 serial={1000 * i + j} netid=2001:db8:0:1::/64 tag=c{i}-{j}" for j in range(25)]
        results[i] = _session(port, lines + ["QUIT"])[0]

    threads = [threading.Thread(target=client, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(all(line.startswith("OK ") for line in out) for out in results.values())
    assert len(server.resolver.registry) == 200
    assert reply(server.resolver, "STATS").startswith("OK entries=200 maps=200 collisions=0 ")

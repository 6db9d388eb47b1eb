"""Seeded synthetic record corpora for ``gen`` and ``bench``."""

import random

from .codecs import EpcTid, IsoTid, encode_tid

SUPPLY_CHAIN_AFI_TEXT = ("A1", "A2", "A3", "A4", "A5")


def _epc_line(rng, tag):
    return f"kind=uii toggle=0 epc={rng.getrandbits(96)} epcform=decimal tag={tag}"


def _iso_line(rng, tag):
    afi = rng.choice(SUPPLY_CHAIN_AFI_TEXT)
    return f"kind=uii toggle=1 serial={rng.getrandbits(48)} radix=10 afi={afi} tag={tag}"


def generate_records(count, seed, epc_ratio=0.5):
    """UII records: 96-bit decimal EPCs with probability ``epc_ratio``, else
    decimal ISO serials of at most 48 bits."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if not 0.0 <= epc_ratio <= 1.0:
        raise ValueError("epc-ratio must be within [0, 1]")
    rng = random.Random(seed)
    lines = []
    for i in range(1, count + 1):
        tag = f"gen-{i:06d}"
        lines.append(_epc_line(rng, tag) if rng.random() < epc_ratio else _iso_line(rng, tag))
    return lines


def generate_mixed_records(count, seed, include_tid=True):
    """Records cycling through all four dispatch paths (UII only if not ``include_tid``)."""
    rng = random.Random(seed)
    lines = []
    paths = 4 if include_tid else 2
    for i in range(count):
        tag = f"bench-{i:06d}"
        path = i % paths
        if path == 0:
            lines.append(_epc_line(rng, tag))
        elif path == 1:
            lines.append(_iso_line(rng, tag))
        elif path == 2:
            xtid = rng.getrandbits(48) if rng.random() < 0.5 else None
            tid = EpcTid(rng.getrandbits(12), rng.getrandbits(12), xtid)
            lines.append(f"kind=tid mb10={encode_tid(tid).to_hex()} tag={tag}")
        else:
            tid = IsoTid(rng.getrandbits(8), rng.getrandbits(48))
            lines.append(f"kind=tid mb10={encode_tid(tid).to_hex()} tag={tag}")
    return lines

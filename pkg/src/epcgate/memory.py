"""RFID tag memory banks and the control fields that drive dispatch.

Bit addresses follow the usual Gen2 memory map convention: address 0x00 is
the most significant bit of the first hex digit of a dump and addresses
ascend left to right. MB01 (UII) is laid out as::

    0x00-0x0F  stored CRC-16 (kept, never validated)
    0x10-0x1F  protocol-control word
               0x10-0x14 length in 16-bit words
               0x17      toggle (0 = EPC, 1 = ISO)
               0x18-0x1F AFI when toggle = 1
    0x20-      UII payload
"""

import enum
from dataclasses import dataclass, field

from .bits import BitString, hex_dump_bits
from .errors import (
    DuplicateBank,
    EmptyUii,
    MalformedDump,
    RangeExceedsBank,
    TruncatedBank,
    WrongBank,
)

TOGGLE_ADDR = 0x17
AFI_ADDR = 0x18
LENGTH_ADDR = 0x10
LENGTH_BITS = 5
PAYLOAD_ADDR = 0x20
AC_ADDR = 0x00

SUPPLY_CHAIN_AFIS = frozenset({0xA1, 0xA2, 0xA3, 0xA4, 0xA5})


class BankId(enum.IntEnum):
    RESERVED = 0b00
    UII = 0b01
    TID = 0b10
    USER = 0b11

    @property
    def label(self):
        return f"MB{self.value:02b}"


@dataclass(frozen=True)
class MemoryBank:
    bank_id: BankId
    data: BitString

    def __len__(self):
        return len(self.data)

    def to_hex(self):
        return self.data.to_hex()


@dataclass(frozen=True)
class TagMemory:
    """Up to one bank per bank id; at least one of MB01 or MB10."""

    banks: dict = field(default_factory=dict)

    def __post_init__(self):
        if BankId.UII not in self.banks and BankId.TID not in self.banks:
            raise ValueError("tag memory needs an MB01 or MB10 bank")
        for bank_id, bank in self.banks.items():
            if bank.bank_id != bank_id:
                raise ValueError(f"bank stored under {bank_id!r} claims {bank.bank_id!r}")

    @classmethod
    def from_banks(cls, banks):
        table = {}
        for bank in banks:
            if bank.bank_id in table:
                raise DuplicateBank(f"{bank.bank_id.label} given twice")
            table[bank.bank_id] = bank
        return cls(table)

    @property
    def uii(self):
        return self.banks.get(BankId.UII)

    @property
    def tid(self):
        return self.banks.get(BankId.TID)


def parse_bank_dump(hex_text, bank_id):
    return MemoryBank(BankId(bank_id), hex_dump_bits(hex_text))


def read_field(bank, start, length):
    """Bits ``[start, start + length)`` of ``bank``."""
    if length < 1:
        raise ValueError(f"field length must be >= 1, got {length}")
    if start < 0 or start + length > len(bank.data):
        raise RangeExceedsBank(
            f"bits 0x{start:X}..0x{start + length - 1:X} outside {len(bank.data)}-bit {bank.bank_id.label}"
        )
    return bank.data[start:start + length]


def _require(bank, bank_id, min_bits):
    if bank.bank_id != bank_id:
        raise WrongBank(f"expected {BankId(bank_id).label}, got {bank.bank_id.label}")
    if len(bank.data) < min_bits:
        raise TruncatedBank(f"{bank.bank_id.label} has {len(bank.data)} bits, need {min_bits}")


def read_toggle(mb01):
    _require(mb01, BankId.UII, TOGGLE_ADDR + 1)
    return mb01.data[TOGGLE_ADDR]


def read_afi(mb01):
    _require(mb01, BankId.UII, AFI_ADDR + 8)
    return read_field(mb01, AFI_ADDR, 8).value


def read_uii_length(mb01):
    """Payload length in 16-bit words, from the protocol-control word."""
    _require(mb01, BankId.UII, PAYLOAD_ADDR)
    return read_field(mb01, LENGTH_ADDR, LENGTH_BITS).value


def read_uii_payload(mb01):
    words = read_uii_length(mb01)
    if words == 0:
        raise EmptyUii("protocol-control word declares a zero-length UII")
    width = 16 * words
    if PAYLOAD_ADDR + width > len(mb01.data):
        raise TruncatedBank(
            f"UII declares {width} bits but only {len(mb01.data) - PAYLOAD_ADDR} follow the control word"
        )
    return read_field(mb01, PAYLOAD_ADDR, width)


def read_ac(mb10):
    _require(mb10, BankId.TID, AC_ADDR + 8)
    return read_field(mb10, AC_ADDR, 8).value


def is_supply_chain_afi(afi):
    return afi in SUPPLY_CHAIN_AFIS


_BANK_KEYS = {"MB00": BankId.RESERVED, "MB01": BankId.UII, "MB10": BankId.TID, "MB11": BankId.USER}


def parse_tag_dumps(lines):
    """Parse the block-structured tag dump text format.

    Each block starts with ``tag <key>`` followed by ``MBxx=<hex>`` lines; a
    blank line ends the block and ``#`` lines are comments. Returns a list of
    ``(tag_key, TagMemory)`` in file order.
    """
    tags = []
    seen = set()
    key = None
    banks = []
    start = 0

    def close():
        if key is None:
            return
        try:
            tags.append((key, TagMemory.from_banks(banks)))
        except DuplicateBank as exc:
            raise MalformedDump(start, str(exc)) from exc
        except ValueError as exc:
            raise MalformedDump(start, str(exc)) from exc

    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            close()
            key, banks = None, []
            continue
        if key is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "tag":
                raise MalformedDump(lineno, f"expected 'tag <key>', got {line!r}")
            key = parts[1]
            if key in seen:
                raise MalformedDump(lineno, f"duplicate tag key {key!r}")
            seen.add(key)
            start = lineno
            continue
        name, sep, hex_text = line.partition("=")
        if not sep or name.upper() not in _BANK_KEYS:
            raise MalformedDump(lineno, f"expected MBxx=<hex>, got {line!r}")
        banks.append(parse_bank_dump(hex_text, _BANK_KEYS[name.upper()]))
    close()
    return tags

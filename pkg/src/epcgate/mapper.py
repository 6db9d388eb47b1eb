"""Tag identity to IPv6 address mapping.

Two mechanisms feed one assembly step:

* UII mapping dispatches on the MB01 toggle bit: EPC identifiers
  (toggle 0) and ISO serial numbers (toggle 1).
* TID mapping dispatches on the allocation class: E2h uses
  MDID + model number + XTID, E0h uses the 48-bit serial.

Over-long identifiers keep their last 64 bits; short ones are zero
extended on the left. The 64-bit result is joined with the reader's
64-bit Net ID.

``MappingMode.CANONICAL`` puts the Net ID in the routing half and the
binary identity in the interface id. ``MappingMode.FIGURE_COMPAT``
reproduces the published sample output: decimal digits become nibbles
and the tag half is printed before the Net ID.
"""

import enum
import ipaddress
import re
from dataclasses import dataclass
from typing import Optional

from .bits import BitString
from .codecs import EpcIdentifier, EpcTid, IsoTid, IsoUii, serial_to_bits
from .errors import (
    CompatRequiresDecimal,
    CompatUnsupportedForTid,
    EmptyIdentifier,
    InvalidToggle,
    MalformedNetId,
    NonDecimalDigit,
    PayloadKindMismatch,
    PrefixNot64,
    SerialTooLong,
    WrongLength,
)

Ipv6Address = ipaddress.IPv6Address

MASK64 = (1 << 64) - 1


class MappingMode(str, enum.Enum):
    CANONICAL = "canonical"
    FIGURE_COMPAT = "figure-compat"

    def __str__(self):
        return self.value


class Dispatch(str, enum.Enum):
    UII_EPC = "uii-epc"
    UII_ISO = "uii-iso"
    TID_EPC = "tid-epc"
    TID_ISO = "tid-iso"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class NetId:
    prefix: int
    source_text: str = ""

    def __post_init__(self):
        if not 0 <= self.prefix <= MASK64:
            raise ValueError(f"Net ID {self.prefix:#x} is not a 64-bit value")

    def hextets(self):
        return ":".join(f"{(self.prefix >> s) & 0xFFFF:04x}" for s in (48, 32, 16, 0))


@dataclass(frozen=True)
class IsoSerial:
    """An ISO serial number with its declared radix (10 or 16)."""

    text: str
    radix: int = 10

    @classmethod
    def from_uii(cls, uii: IsoUii, radix=10):
        return cls(uii.serial, radix)


@dataclass(frozen=True)
class MappedAddress:
    address: Ipv6Address
    mode: MappingMode
    dispatch: Dispatch
    net_id: NetId
    tag_key: Optional[str] = None

    def __str__(self):
        return format_ipv6(self.address)


def fit64(bits: BitString) -> BitString:
    """Select the last 64 bits, or left-pad with zeros up to 64."""
    if len(bits) == 0:
        raise EmptyIdentifier("cannot map an empty identifier")
    if len(bits) > 64:
        return bits.suffix(64)
    return bits.zero_extend(64)


def _check_decimal(digits):
    for pos, ch in enumerate(digits):
        if ch not in "0123456789":
            raise NonDecimalDigit(pos, digits)


def select_digits16(digits: str) -> str:
    if not digits:
        raise EmptyIdentifier("cannot map an empty digit string")
    _check_decimal(digits)
    return digits[-16:].rjust(16, "0")


def digits_to_hextets(digits16: str) -> int:
    _check_decimal(digits16)
    if len(digits16) != 16:
        raise WrongLength(f"expected 16 digits, got {len(digits16)}")
    # each decimal digit is read as one hex nibble
    return int(digits16, 16)


def _assemble(tag_half, net_id, mode):
    if mode is MappingMode.CANONICAL:
        return Ipv6Address((net_id.prefix << 64) | tag_half)
    return Ipv6Address((tag_half << 64) | net_id.prefix)


def map_from_uii(toggle, payload, net_id: NetId, mode=MappingMode.CANONICAL, tag_key=None):
    """Map a UII identity; ``payload`` is an EpcIdentifier (toggle 0) or IsoSerial (toggle 1)."""
    mode = MappingMode(mode)
    if toggle not in (0, 1):
        raise InvalidToggle(f"toggle must be 0 or 1, got {toggle!r}")
    if toggle == 0:
        if not isinstance(payload, EpcIdentifier):
            raise PayloadKindMismatch("toggle 0 needs an EPC identifier")
        dispatch = Dispatch.UII_EPC
        if mode is MappingMode.CANONICAL:
            tag_half = fit64(payload.bits).value
        else:
            if payload.decimal_form is None:
                raise CompatRequiresDecimal("figure-compat needs the EPC as decimal digits")
            tag_half = digits_to_hextets(select_digits16(payload.decimal_form))
    else:
        if not isinstance(payload, IsoSerial):
            raise PayloadKindMismatch("toggle 1 needs an ISO serial number")
        dispatch = Dispatch.UII_ISO
        if mode is MappingMode.FIGURE_COMPAT and payload.radix != 10:
            raise CompatRequiresDecimal("figure-compat needs a radix 10 serial")
        bits = serial_to_bits(payload.text, payload.radix)
        if mode is MappingMode.CANONICAL:
            if len(bits) > 64:
                raise SerialTooLong(f"serial needs {len(bits)} bits, ISO serials are at most 64")
            tag_half = fit64(bits).value
        else:
            tag_half = digits_to_hextets(select_digits16(payload.text))
    return MappedAddress(_assemble(tag_half, net_id, mode), mode, dispatch, net_id, tag_key)


def map_from_tid(record, net_id: NetId, mode=MappingMode.CANONICAL, tag_key=None):
    mode = MappingMode(mode)
    if mode is not MappingMode.CANONICAL:
        raise CompatUnsupportedForTid("TID mapping has no figure-compat form")
    if isinstance(record, EpcTid):
        dispatch = Dispatch.TID_EPC
    elif isinstance(record, IsoTid):
        dispatch = Dispatch.TID_ISO
    else:
        raise TypeError(f"not a TID record: {record!r}")
    tag_half = fit64(record.identity_bits()).value
    return MappedAddress(_assemble(tag_half, net_id, mode), mode, dispatch, net_id, tag_key)


_HEXTETS4 = re.compile(r"^[0-9A-Fa-f]{1,4}(:[0-9A-Fa-f]{1,4}){3}$")


def parse_netid(text: str) -> NetId:
    """Accept ``6789:1011:1213:1415`` or a ``/64`` prefix such as ``2001:db8:0:1::/64``."""
    text = text.strip()
    if not text:
        raise MalformedNetId("empty Net ID")
    if "/" in text:
        addr, _, plen = text.partition("/")
        if not plen.isdigit():
            raise MalformedNetId(f"bad prefix length in {text!r}")
        if int(plen) != 64:
            raise PrefixNot64(f"prefix length /{plen} is not /64")
        try:
            net = ipaddress.IPv6Network(text)
        except ValueError as exc:
            raise MalformedNetId(f"{text!r}: {exc}") from None
        return NetId(int(net.network_address) >> 64, text)
    if not _HEXTETS4.match(text):
        raise MalformedNetId(f"{text!r} is neither four hextets nor a /64 prefix")
    value = 0
    for group in text.split(":"):
        value = (value << 16) | int(group, 16)
    return NetId(value, text)


def format_ipv6(addr, suffix_128=False, compress=False) -> str:
    """Eight zero-padded lowercase hextets by default."""
    addr = Ipv6Address(addr)
    text = addr.compressed if compress else addr.exploded
    return text + " /128" if suffix_128 else text

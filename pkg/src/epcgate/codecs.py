"""Tag identity codecs: TID records, ISO/IEC 15459 UIIs and EPC/serial bits."""

from dataclasses import dataclass
from typing import Optional, Union

from .bits import BitString
from .errors import (
    EmptyIdentifier,
    InvalidDigit,
    InvalidRadix,
    LengthMismatch,
    MalformedIdentifier,
    NonNumericCin,
    TruncatedBank,
    UnknownAllocationClass,
    UnsupportedDataIdentifier,
)
from .memory import BankId, MemoryBank, read_ac, read_field

AC_EPC = 0xE2
AC_ISO = 0xE0

XTID_ADDR = 0x20
XTID_BITS = 48

URN_PREFIX = "urn:iso:std:iso-iec:15459:"
DATA_IDENTIFIERS = frozenset({"25S", "25B"})


@dataclass(frozen=True)
class EpcTid:
    """E2h TID: 12-bit mask designer id, 12-bit model number, optional XTID.

    ``xtid_truncated`` is set when the bank held more than 48 XTID bits and
    only the first 48 were kept.
    """

    mdid: int
    model_number: int
    xtid_serial: Optional[int] = None
    xtid_truncated: bool = False

    def __post_init__(self):
        _check_width("mdid", self.mdid, 12)
        _check_width("model_number", self.model_number, 12)
        if self.xtid_serial is not None:
            _check_width("xtid_serial", self.xtid_serial, XTID_BITS)

    @property
    def ac(self):
        return AC_EPC

    def identity_bits(self):
        bits = BitString(self.mdid, 12) + BitString(self.model_number, 12)
        if self.xtid_serial is not None:
            bits = bits + BitString(self.xtid_serial, XTID_BITS)
        return bits


@dataclass(frozen=True)
class IsoTid:
    """E0h TID: 8-bit manufacturer id and 48-bit serial number."""

    manufacturer_id: int
    serial_number: int

    def __post_init__(self):
        _check_width("manufacturer_id", self.manufacturer_id, 8)
        _check_width("serial_number", self.serial_number, 48)

    @property
    def ac(self):
        return AC_ISO

    def identity_bits(self):
        return BitString(self.serial_number, 48)


TidRecord = Union[EpcTid, IsoTid]


def _check_width(name, value, width):
    if not 0 <= value < (1 << width):
        raise ValueError(f"{name}={value:#x} does not fit in {width} bits")


def parse_tid(mb10):
    ac = read_ac(mb10)
    if ac == AC_EPC:
        if len(mb10) < XTID_ADDR:
            raise TruncatedBank(f"E2h TID needs {XTID_ADDR} bits, bank has {len(mb10)}")
        mdid = read_field(mb10, 0x08, 12).value
        model = read_field(mb10, 0x14, 12).value
        extra = len(mb10) - XTID_ADDR
        if extra == 0:
            return EpcTid(mdid, model)
        if extra < XTID_BITS:
            raise TruncatedBank(f"E2h TID carries a partial XTID of {extra} bits")
        xtid = read_field(mb10, XTID_ADDR, XTID_BITS).value
        return EpcTid(mdid, model, xtid, xtid_truncated=extra > XTID_BITS)
    if ac == AC_ISO:
        if len(mb10) < 0x40:
            raise TruncatedBank(f"E0h TID needs 64 bits, bank has {len(mb10)}")
        return IsoTid(read_field(mb10, 0x08, 8).value, read_field(mb10, 0x10, 48).value)
    raise UnknownAllocationClass(ac)


def encode_tid(record):
    """Lay a TID record out as an MB10 bank (inverse of :func:`parse_tid`)."""
    if isinstance(record, EpcTid):
        data = BitString(AC_EPC, 8) + record.identity_bits()
    else:
        data = BitString(AC_ISO, 8) + BitString(record.manufacturer_id, 8) + record.identity_bits()
    return MemoryBank(BankId.TID, data)


@dataclass(frozen=True)
class IsoUii:
    """An ISO/IEC 15459 unique item identifier (DI 25S or 25B).

    ``serial`` is the full trailing payload; any part or lot/batch prefix
    stays fused to it.
    """

    di: str
    iac: str
    cin: str
    serial: str

    def __post_init__(self):
        if self.di not in DATA_IDENTIFIERS:
            raise UnsupportedDataIdentifier(f"data identifier {self.di!r} is not one of 25S, 25B")
        if not self.iac or len(self.iac) > 3:
            raise MalformedIdentifier(f"issuing agency code {self.iac!r} must be 1-3 characters")
        if not self.cin or not self.serial:
            raise MalformedIdentifier("CIN and serial must be non-empty")
        if not (self.cin.isascii() and self.cin.isdigit()):
            raise NonNumericCin(f"CIN {self.cin!r} is not a digit string")

    def dotted(self):
        return f"{self.di}.{self.iac}.{self.cin}.{self.serial}"


def parse_iso_uii(text):
    """Parse ``DI.IAC.CIN.SERIAL`` (optionally URN-prefixed)."""
    if text.startswith(URN_PREFIX):
        text = text[len(URN_PREFIX):]
    if not text:
        raise MalformedIdentifier("empty identifier")
    parts = text.split(".", 3)
    if len(parts) < 4:
        raise MalformedIdentifier(f"{text!r} has {len(parts)} segments, need 4")
    if any(not p for p in parts[:3]) or any(not p for p in parts[3].split(".")):
        raise MalformedIdentifier(f"{text!r} has an empty segment")
    return IsoUii(*parts)


def render_urn(uii):
    return URN_PREFIX + uii.dotted()


_RADIX_DIGITS = {
    10: frozenset("0123456789"),
    16: frozenset("0123456789abcdefABCDEF"),
}


def serial_to_bits(text, radix):
    """Minimal-width binary of a decimal or hexadecimal serial."""
    if radix not in _RADIX_DIGITS:
        raise InvalidRadix(f"radix {radix!r} is not 10 or 16")
    if not text:
        raise EmptyIdentifier("serial is empty")
    digits = _RADIX_DIGITS[radix]
    for pos, ch in enumerate(text):
        if ch not in digits:
            raise InvalidDigit(pos, text)
    return BitString.minimal(int(text, radix))


@dataclass(frozen=True)
class EpcIdentifier:
    bits: BitString
    decimal_form: Optional[str] = None


def epc_input_to_bits(text, form, bit_length=None):
    """Convert a caller-tagged EPC to bits.

    ``form="hex"``: digits are taken verbatim and left-aligned; ``bit_length``
    defaults to four bits per digit and must round up to the digit count,
    with any trailing pad bits zero. ``form="decimal"``: minimal binary of
    the integer, keeping the digit string.
    """
    if not text:
        raise EmptyIdentifier("EPC is empty")
    if form == "decimal":
        return EpcIdentifier(serial_to_bits(text, 10), decimal_form=text)
    if form != "hex":
        raise ValueError(f"EPC form must be 'hex' or 'decimal', got {form!r}")
    for pos, ch in enumerate(text):
        if ch not in _RADIX_DIGITS[16]:
            raise InvalidDigit(pos, text)
    full = BitString.from_hex(text)
    if bit_length is None:
        return EpcIdentifier(full)
    if bit_length < 1 or -(-bit_length // 4) != len(text):
        raise LengthMismatch(f"{len(text)} hex digits cannot hold exactly {bit_length} bits")
    if full.suffix(full.length - bit_length).value:
        raise LengthMismatch(f"pad bits beyond bit {bit_length} are not zero")
    return EpcIdentifier(full[:bit_length])

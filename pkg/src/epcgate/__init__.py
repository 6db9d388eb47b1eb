"""RFID tag memory parsing and tag identity to IPv6 address mapping."""

from .bits import BitString
from .codecs import (
    EpcIdentifier,
    EpcTid,
    IsoTid,
    IsoUii,
    encode_tid,
    epc_input_to_bits,
    parse_iso_uii,
    parse_tid,
    render_urn,
    serial_to_bits,
)
from .errors import EpcGateError
from .mapper import (
    Dispatch,
    IsoSerial,
    MappedAddress,
    MappingMode,
    NetId,
    digits_to_hextets,
    fit64,
    format_ipv6,
    map_from_tid,
    map_from_uii,
    parse_netid,
    select_digits16,
)
from .memory import (
    BankId,
    MemoryBank,
    TagMemory,
    parse_bank_dump,
    parse_tag_dumps,
    read_ac,
    read_afi,
    read_field,
    read_toggle,
    read_uii_payload,
)
from .registry import Registry, RegistryEntry

__version__ = "0.1.0"

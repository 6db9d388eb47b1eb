"""``key=value`` mapping records shared by the batch format, the wire
protocol and the ``map`` command.

Record keys::

    kind     uii | tid
    toggle   0 | 1            (uii; optional when mb01 is given)
    epc      EPC digits       (uii, toggle 0)
    epcform  decimal | hex    (default decimal)
    serial   ISO serial       (uii, toggle 1)
    radix    10 | 16          (default 10)
    afi      AFI byte as hex  (uii, toggle 1; checked against mb01)
    mb01     MB01 hex dump    (uii)
    mb10     MB10 hex dump    (tid)
    tag      tag key
"""

from .codecs import epc_input_to_bits, parse_tid
from .errors import EpcGateError, InvalidRadix, InvalidToggle, PayloadKindMismatch
from .mapper import IsoSerial, map_from_tid, map_from_uii
from .memory import BankId, parse_bank_dump, read_afi, read_toggle, read_uii_payload
from .registry import valid_tag_key

RECORD_KEYS = ("kind", "toggle", "epc", "epcform", "serial", "radix", "afi", "mb01", "mb10", "tag")


class RequestError(EpcGateError):
    """Malformed record syntax; ``detail`` is a short ``key=value`` hint."""

    def __init__(self, detail):
        self.detail = detail
        super().__init__(detail)


class MalformedToken(RequestError):
    pass


class UnknownKey(RequestError):
    pass


class DuplicateKey(RequestError):
    pass


class MissingKey(RequestError):
    pass


class UnexpectedKey(RequestError):
    pass


class InvalidValue(RequestError):
    pass


class AfiMismatch(EpcGateError):
    pass


def parse_kv(tokens, allowed):
    """Split ``key=value`` tokens into a dict, rejecting unknown and repeated keys."""
    fields = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep or not key:
            raise MalformedToken(f"token={token}")
        if key not in allowed:
            raise UnknownKey(f"unknown-key={key}")
        if key in fields:
            raise DuplicateKey(f"duplicate-key={key}")
        fields[key] = value
    return fields


def _forbid(fields, keys, why):
    for key in keys:
        if key in fields:
            raise UnexpectedKey(f"unexpected-key={key} ({why})")


def _require(fields, key):
    if key not in fields:
        raise MissingKey(f"missing-key={key}")
    return fields[key]


def _toggle(text):
    if text not in ("0", "1"):
        raise InvalidToggle(f"toggle must be 0 or 1, got {text!r}")
    return int(text)


def _radix(text):
    if text not in ("10", "16"):
        raise InvalidRadix(f"radix must be 10 or 16, got {text!r}")
    return int(text)


def map_record(fields, net_id, mode):
    """Map one parsed record to a :class:`~epcgate.mapper.MappedAddress`."""
    kind = _require(fields, "kind")
    tag = fields.get("tag")
    if tag is not None and not valid_tag_key(tag):
        raise InvalidValue("tag=<empty>")
    if kind == "tid":
        _forbid(fields, ("toggle", "epc", "epcform", "serial", "radix", "afi", "mb01"), "kind=tid")
        bank = parse_bank_dump(_require(fields, "mb10"), BankId.TID)
        return map_from_tid(parse_tid(bank), net_id, mode, tag_key=tag)
    if kind != "uii":
        raise InvalidValue(f"kind={kind}")
    _forbid(fields, ("mb10",), "kind=uii")

    toggle = _toggle(fields["toggle"]) if "toggle" in fields else None
    mb01 = parse_bank_dump(fields["mb01"], BankId.UII) if "mb01" in fields else None
    if mb01 is not None:
        bank_toggle = read_toggle(mb01)
        if toggle is not None and toggle != bank_toggle:
            raise PayloadKindMismatch(f"toggle={toggle} but MB01 toggle bit is {bank_toggle}")
        toggle = bank_toggle
    elif toggle is None:
        raise MissingKey("missing-key=toggle")

    if toggle == 0:
        _forbid(fields, ("serial", "radix", "afi"), "toggle=0")
        if "epc" in fields:
            if mb01 is not None:
                raise UnexpectedKey("unexpected-key=epc (EPC is read from mb01)")
            form = fields.get("epcform", "decimal")
            if form not in ("decimal", "hex"):
                raise InvalidValue(f"epcform={form}")
            epc = epc_input_to_bits(fields["epc"], form)
        elif mb01 is not None:
            _forbid(fields, ("epcform",), "EPC is read from mb01")
            epc = epc_input_to_bits(read_uii_payload(mb01).to_hex(), "hex")
        else:
            raise MissingKey("missing-key=epc")
        return map_from_uii(0, epc, net_id, mode, tag_key=tag)

    _forbid(fields, ("epc", "epcform"), "toggle=1")
    serial = IsoSerial(_require(fields, "serial"), _radix(fields.get("radix", "10")))
    if "afi" in fields:
        afi_text = fields["afi"]
        if len(afi_text) != 2 or any(c not in "0123456789abcdefABCDEF" for c in afi_text):
            raise InvalidValue(f"afi={afi_text}")
        if mb01 is not None and read_afi(mb01) != int(afi_text, 16):
            raise AfiMismatch(f"afi={afi_text} but MB01 holds {read_afi(mb01):02X}")
    return map_from_uii(1, serial, net_id, mode, tag_key=tag)

"""Reference computations that share no code with the package.

Everything here works on '0'/'1' character strings so that a bug in the
integer-based BitString cannot hide itself.
"""

NIBBLES = {format(i, "X"): format(i, "04b") for i in range(16)}


def hex_to_bitchars(text):
    return "".join(NIBBLES[c.upper()] for c in text)


def bitchars_to_hex(bits):
    assert len(bits) % 4 == 0
    inverse = {v: k for k, v in NIBBLES.items()}
    return "".join(inverse[bits[i:i + 4]] for i in range(0, len(bits), 4))


def decimal_to_bitchars(digits):
    """Schoolbook repeated halving of a decimal digit string."""
    digits = digits.lstrip("0")
    if not digits:
        return "0"
    out = []
    while digits:
        carry = 0
        halved = []
        for d in digits:
            cur = carry * 10 + (ord(d) - 48)
            halved.append(chr(48 + cur // 2))
            carry = cur % 2
        out.append(str(carry))
        digits = "".join(halved).lstrip("0")
    return "".join(reversed(out))


def select_last64(bits):
    if len(bits) >= 64:
        return bits[-64:]
    return "0" * (64 - len(bits)) + bits


def hextets(bits128):
    h = bitchars_to_hex(bits128).lower()
    return ":".join(h[i:i + 4] for i in range(0, 32, 4))


def tid_bank_hex(record):
    """Lay out a TID record by string concatenation of fixed-width fields."""
    from epcgate import EpcTid

    if isinstance(record, EpcTid):
        bits = "11100010" + format(record.mdid, "012b") + format(record.model_number, "012b")
        if record.xtid_serial is not None:
            bits += format(record.xtid_serial, "048b")
    else:
        bits = "11100000" + format(record.manufacturer_id, "08b") + format(record.serial_number, "048b")
    return bitchars_to_hex(bits)

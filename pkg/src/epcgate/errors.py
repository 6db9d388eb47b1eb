"""Exception hierarchy.

Every error carries a stable ``name`` (the class name) which is what the
CLI and the resolver wire protocol report.
"""


class EpcGateError(Exception):
    """Base class for all tag parsing, mapping and registry errors."""

    @property
    def name(self):
        return type(self).__name__

    def wire_detail(self):
        """Extra ``key=value`` detail rendered after the name, or ``''``."""
        return ""


class PositionalError(EpcGateError):
    """An error tied to one character of the input.

    ``position`` is the 0-based index of the offending character. Human facing
    renderings (CLI, wire) report it as a 1-based column.
    """

    def __init__(self, position, text=""):
        self.position = position
        self.text = text
        super().__init__(f"{type(self).__name__} at position {position} in {text!r}")

    def wire_detail(self):
        return f"position={self.position + 1}"


# tag memory
class EmptyDump(EpcGateError):
    pass


class InvalidHexDigit(PositionalError):
    pass


class OddLengthDump(EpcGateError):
    pass


class RangeExceedsBank(EpcGateError):
    pass


class TruncatedBank(EpcGateError):
    pass


class WrongBank(EpcGateError):
    pass


class EmptyUii(EpcGateError):
    pass


class DuplicateBank(EpcGateError):
    pass


class MalformedDump(EpcGateError):
    def __init__(self, lineno, reason):
        self.lineno = lineno
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}")

    def wire_detail(self):
        return f"line={self.lineno}"


# identifier codecs
class UnknownAllocationClass(EpcGateError):
    def __init__(self, ac):
        self.ac = ac
        super().__init__(f"allocation class 0x{ac:02X} is neither E2h nor E0h")

    def wire_detail(self):
        return f"ac={self.ac:02X}"


class UnsupportedDataIdentifier(EpcGateError):
    pass


class MalformedIdentifier(EpcGateError):
    pass


class NonNumericCin(EpcGateError):
    pass


class InvalidDigit(PositionalError):
    pass


class InvalidRadix(EpcGateError):
    pass


class EmptyIdentifier(EpcGateError):
    pass


class LengthMismatch(EpcGateError):
    pass


# address mapper
class NonDecimalDigit(PositionalError):
    pass


class WrongLength(EpcGateError):
    pass


class InvalidToggle(EpcGateError):
    pass


class PayloadKindMismatch(EpcGateError):
    pass


class SerialTooLong(EpcGateError):
    pass


class CompatRequiresDecimal(EpcGateError):
    pass


class CompatUnsupportedForTid(EpcGateError):
    pass


class IsoSerialUnavailable(EpcGateError):
    pass


class MalformedNetId(EpcGateError):
    pass


class PrefixNot64(EpcGateError):
    pass


# registry
class AddressCollision(EpcGateError):
    def __init__(self, address, existing_key):
        self.address = address
        self.existing_key = existing_key
        super().__init__(f"{address} is already bound to {existing_key!r}")


class DuplicateTagKey(EpcGateError):
    def __init__(self, tag_key, existing_address):
        self.tag_key = tag_key
        self.existing_address = existing_address
        super().__init__(f"{tag_key!r} is already bound to {existing_address}")


class NotFound(EpcGateError):
    pass


class InvalidEntry(EpcGateError):
    pass


class CorruptLine(EpcGateError):
    def __init__(self, lineno, reason):
        self.lineno = lineno
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}")


class DuplicateOnLoad(EpcGateError):
    def __init__(self, lineno, reason):
        self.lineno = lineno
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}")

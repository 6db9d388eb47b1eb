"""Length-explicit bit strings, most significant bit first."""

from dataclasses import dataclass

from .errors import EmptyDump, InvalidHexDigit, OddLengthDump

HEX_DIGITS = frozenset("0123456789abcdefABCDEF")


@dataclass(frozen=True)
class BitString:
    """An ordered sequence of ``length`` bits held as an unsigned integer.

    Bit 0 is the most significant bit, so ``BitString(0b100, 3)[0] == 1``.
    Leading zero bits are significant: ``BitString(1, 8)`` and
    ``BitString(1, 1)`` are different values.
    """

    value: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise ValueError(f"negative length {self.length}")
        if self.value < 0 or self.value >> self.length:
            raise ValueError(f"value {self.value:#x} does not fit in {self.length} bits")

    @classmethod
    def from_bin(cls, text):
        return cls(int(text, 2) if text else 0, len(text))

    @classmethod
    def from_hex(cls, text):
        """Expand ``text`` at 4 bits per digit. Any digit count is accepted."""
        for pos, ch in enumerate(text):
            if ch not in HEX_DIGITS:
                raise InvalidHexDigit(pos, text)
        return cls(int(text, 16) if text else 0, 4 * len(text))

    @classmethod
    def minimal(cls, value):
        """Shortest encoding of a non-negative integer; zero is a single 0 bit."""
        return cls(value, max(value.bit_length(), 1))

    def __len__(self):
        return self.length

    def __int__(self):
        return self.value

    def __getitem__(self, key):
        if isinstance(key, slice):
            start, stop, step = key.indices(self.length)
            if step != 1:
                raise ValueError("bit slices must be contiguous")
            width = max(stop - start, 0)
            return BitString((self.value >> (self.length - start - width)) & ((1 << width) - 1), width)
        if key < 0:
            key += self.length
        if not 0 <= key < self.length:
            raise IndexError(key)
        return (self.value >> (self.length - 1 - key)) & 1

    def __add__(self, other):
        if not isinstance(other, BitString):
            return NotImplemented
        return BitString((self.value << other.length) | other.value, self.length + other.length)

    def __iter__(self):
        for i in range(self.length):
            yield self[i]

    def to_bin(self):
        return format(self.value, f"0{self.length}b") if self.length else ""

    def to_hex(self):
        """Uppercase hex rendering; requires a whole number of nibbles."""
        if self.length % 4:
            raise ValueError(f"{self.length} bits is not a whole number of hex digits")
        return format(self.value, f"0{self.length // 4}X") if self.length else ""

    def zero_extend(self, width):
        """Left-pad with zero bits to ``width``; never shortens."""
        return BitString(self.value, max(width, self.length))

    def suffix(self, width):
        """The last ``width`` bits (the whole string if it is shorter)."""
        return self[max(self.length - width, 0):]

    def __repr__(self):
        if self.length % 4 == 0 and self.length:
            return f"BitString(0x{self.to_hex()}, {self.length})"
        return f"BitString(0b{self.to_bin()}, {self.length})"


def hex_dump_bits(text):
    """Decode a memory dump: non-empty, an even number of hex digits."""
    if not text:
        raise EmptyDump("dump contains no hex digits")
    bits = BitString.from_hex(text)
    if len(text) % 2:
        raise OddLengthDump(f"dump has an odd number of hex digits ({len(text)})")
    return bits

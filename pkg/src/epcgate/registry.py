"""Bidirectional tag key <-> IPv6 address table with a line-oriented file form.

File format::

    epcgate-registry v1
    <ipv6 exploded>\t<tag_key>\t<dispatch>\t<mode>\t<ISO-8601 UTC>
    ...

Lines starting with ``#`` are comments; forced replacements leave a
``# replaced ...`` audit comment that survives load/save.

A registry has a single-writer, multi-reader contract. Lookups may run
concurrently with each other; callers must serialize :meth:`Registry.register`.
"""

import os
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import (
    AddressCollision,
    CorruptLine,
    DuplicateOnLoad,
    DuplicateTagKey,
    InvalidEntry,
    NotFound,
)
from .mapper import Dispatch, Ipv6Address, MappingMode, format_ipv6

HEADER = "epcgate-registry v1"


def utc_now():
    return datetime.now(timezone.utc)


def format_timestamp(ts):
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def parse_timestamp(text):
    if not text.endswith("Z"):
        raise ValueError("timestamp must be UTC with a Z suffix")
    ts = datetime.fromisoformat(text[:-1])
    if ts.tzinfo is not None:
        raise ValueError("timestamp carries a second offset")
    return ts.replace(tzinfo=timezone.utc)


def valid_tag_key(key):
    return bool(key) and not any(ch.isspace() for ch in key)


@dataclass(frozen=True)
class RegistryEntry:
    address: Ipv6Address
    tag_key: str
    dispatch: Dispatch
    mode: MappingMode
    created_at: datetime

    def __post_init__(self):
        if not valid_tag_key(self.tag_key):
            raise InvalidEntry(f"tag key {self.tag_key!r} is empty or contains whitespace")
        object.__setattr__(self, "address", Ipv6Address(self.address))
        object.__setattr__(self, "dispatch", Dispatch(self.dispatch))
        object.__setattr__(self, "mode", MappingMode(self.mode))
        if self.created_at.tzinfo is None:
            raise InvalidEntry("created_at must be timezone-aware")

    @classmethod
    def from_mapped(cls, mapped, tag_key=None, created_at=None):
        return cls(
            mapped.address,
            tag_key or mapped.tag_key,
            mapped.dispatch,
            mapped.mode,
            created_at or utc_now(),
        )

    def to_line(self):
        return "\t".join(
            (format_ipv6(self.address), self.tag_key, self.dispatch.value, self.mode.value,
             format_timestamp(self.created_at))
        )


class Registry:
    def __init__(self, entries=()):
        self._by_address = {}
        self._by_tag = {}
        self.audit = []
        for entry in entries:
            self.register(entry)

    def __len__(self):
        return len(self._by_address)

    def __iter__(self):
        return iter(list(self._by_address.values()))

    def __contains__(self, entry):
        return self._by_address.get(entry.address) == entry

    def entries(self):
        return set(self._by_address.values())

    def register(self, entry, force=False):
        """Insert ``entry``; returns ``self``.

        Re-registering an existing (address, tag_key) pair is a no-op. A clash
        on either side raises unless ``force`` is set, in which case the
        clashing entries are dropped and an audit line is recorded.
        """
        by_addr = self._by_address.get(entry.address)
        by_tag = self._by_tag.get(entry.tag_key)
        if by_addr is not None and by_addr.tag_key == entry.tag_key:
            return self
        if not force:
            if by_addr is not None:
                raise AddressCollision(format_ipv6(entry.address), by_addr.tag_key)
            if by_tag is not None:
                raise DuplicateTagKey(entry.tag_key, format_ipv6(by_tag.address))
        for old in {by_addr, by_tag} - {None}:
            del self._by_address[old.address]
            del self._by_tag[old.tag_key]
            self.audit.append(
                f"# replaced {format_ipv6(old.address)} {old.tag_key} by {entry.tag_key} "
                f"at {format_timestamp(entry.created_at)}"
            )
        self._by_address[entry.address] = entry
        self._by_tag[entry.tag_key] = entry
        return self

    def lookup_by_address(self, address):
        try:
            return self._by_address[Ipv6Address(address)]
        except (KeyError, ValueError):
            raise NotFound(f"no entry for address {address}") from None

    def lookup_by_tag(self, tag_key):
        try:
            return self._by_tag[tag_key]
        except KeyError:
            raise NotFound(f"no entry for tag {tag_key!r}") from None

    def dumps(self):
        lines = [HEADER, *self.audit]
        lines.extend(e.to_line() for e in self._by_address.values())
        return "\n".join(lines) + "\n"

    def save(self, destination):
        """Write atomically: the file on disk is always a complete registry."""
        destination = os.fspath(destination)
        directory = os.path.dirname(os.path.abspath(destination))
        fd, tmp = tempfile.mkstemp(prefix=".registry-", dir=directory)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(self.dumps())
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, destination)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def loads(cls, text):
        reg = cls()
        lines = text.splitlines()
        if not lines or lines[0] != HEADER:
            raise CorruptLine(1, f"missing header {HEADER!r}")
        for lineno, line in enumerate(lines[1:], 2):
            if line.startswith("#"):
                if line.startswith("# replaced "):
                    reg.audit.append(line)
                continue
            if not line:
                continue
            entry = _parse_line(lineno, line)
            try:
                reg.register(entry)
            except (AddressCollision, DuplicateTagKey) as exc:
                raise DuplicateOnLoad(lineno, str(exc)) from None
        return reg

    @classmethod
    def load(cls, source):
        with open(source, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def _parse_line(lineno, line):
    fields = line.split("\t")
    if len(fields) != 5:
        raise CorruptLine(lineno, f"expected 5 tab-separated fields, got {len(fields)}")
    addr_text, tag_key, dispatch, mode, ts = fields
    try:
        address = Ipv6Address(addr_text)
    except ValueError:
        raise CorruptLine(lineno, f"bad address {addr_text!r}") from None
    if format_ipv6(address) != addr_text:
        raise CorruptLine(lineno, f"address {addr_text!r} is not in exploded lowercase form")
    if not valid_tag_key(tag_key):
        raise CorruptLine(lineno, f"bad tag key {tag_key!r}")
    try:
        dispatch = Dispatch(dispatch)
    except ValueError:
        raise CorruptLine(lineno, f"bad dispatch {dispatch!r}") from None
    try:
        mode = MappingMode(mode)
    except ValueError:
        raise CorruptLine(lineno, f"bad mode {mode!r}") from None
    try:
        created_at = parse_timestamp(ts)
    except ValueError as exc:
        raise CorruptLine(lineno, f"bad timestamp {ts!r}: {exc}") from None
    return RegistryEntry(address, tag_key, dispatch, mode, created_at)

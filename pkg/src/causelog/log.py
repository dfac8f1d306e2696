"""JSON-lines event logs with an optional SHA-256 hash chain.

One record per line::

    {"t":1000,"comp":"robot","event":"lane_start","params":{"lane":"1"},"parent":"operator","h":"..."}

``t`` is an integer timestamp in milliseconds, ``params`` maps keys to strings,
``parent`` names the component that issued the event. Unknown top-level keys
are folded into ``params`` so that newer writers stay readable.

When every record carries ``h``, the log is chained: ``h`` is the SHA-256 of
``previous h + "\\n" + canonical record``, starting from 64 zeros.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from typing import Mapping

from .errors import ParseError, ValidationError

GENESIS = "0" * 64
_HEX64 = re.compile(r"[0-9a-f]{64}\Z")
# a damaged line still counts as chained if the key or the digest survived;
# one edited byte cannot destroy both
_CHAIN_HINT = re.compile(rb'"h"\s*:|[0-9a-f]{64}')
_KNOWN = ("t", "comp", "event", "params", "parent", "h")


@dataclass(frozen=True)
class LogRecord:
    seq: int
    t: int
    comp: str
    event: str
    params: Mapping[str, str] = field(default_factory=dict)
    parent: str | None = None
    h: str | None = None

    def body(self) -> dict:
        """Record as an ordered dict without the hash."""
        out: dict = {"t": self.t, "comp": self.comp, "event": self.event}
        if self.params:
            out["params"] = dict(self.params)
        if self.parent is not None:
            out["parent"] = self.parent
        return out

    def canonical(self) -> str:
        return _dumps(self.body())

    def to_line(self) -> str:
        out = self.body()
        if self.h is not None:
            out["h"] = self.h
        return _dumps(out)

    @property
    def label(self) -> str:
        return f"{self.comp}.{self.event}@{self.t}"


@dataclass(frozen=True)
class LogFile:
    records: tuple[LogRecord, ...] = ()

    @property
    def chained(self) -> bool:
        return all(r.h is not None for r in self.records)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, seq: int) -> LogRecord:
        return self.records[seq]

    @property
    def components(self) -> list[str]:
        seen: dict[str, None] = {}
        for r in self.records:
            seen.setdefault(r.comp, None)
        return list(seen)


@dataclass(frozen=True)
class ChainReport:
    ok: bool
    first_bad: int | None
    checked: int
    reason: str = ""

    def __str__(self) -> str:
        if self.ok:
            return f"ok: {self.checked} records verified"
        return f"tampered at seq {self.first_bad}: {self.reason}"


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def chain_hash(prev: str, canonical: str) -> str:
    return hashlib.sha256(f"{prev}\n{canonical}".encode("utf-8")).hexdigest()


class _Builder:
    """Running validation state while reading or appending records."""

    def __init__(self, records: tuple[LogRecord, ...] = ()):
        self.records = list(records)
        self.seen = {r.comp for r in records}
        self.last_t = records[-1].t if records else 0

    def check(self, t, comp, event, params, parent) -> None:
        if isinstance(t, bool) or not isinstance(t, int):
            raise ValidationError("t must be an integer number of milliseconds")
        if t < 0:
            raise ValidationError("t must be non-negative")
        if t < self.last_t:
            raise ValidationError(f"decreasing timestamp {t} after {self.last_t}")
        for key, value in (("comp", comp), ("event", event)):
            if not isinstance(value, str) or not value:
                raise ValidationError(f"{key} must be a non-empty string")
        for k, v in params.items():
            if not isinstance(v, str):
                raise ValidationError(f"param {k!r} must be a string")
        if parent is not None:
            if not isinstance(parent, str) or not parent:
                raise ValidationError("parent must be a non-empty string")
            if parent not in self.seen:
                raise ValidationError(f"parent {parent!r} has no earlier record")

    def add(self, record: LogRecord) -> None:
        self.records.append(record)
        self.seen.add(record.comp)
        self.last_t = record.t


def _record_from_obj(obj, seq: int, builder: _Builder) -> LogRecord:
    if not isinstance(obj, dict):
        raise ValidationError("record must be a JSON object")
    for key in ("t", "comp", "event"):
        if key not in obj:
            raise ValidationError(f"missing required key {key!r}")
    params = obj.get("params", {})
    if not isinstance(params, dict):
        raise ValidationError("params must be an object")
    params = dict(params)
    for k, v in obj.items():
        if k in _KNOWN:
            continue
        if k in params:
            raise ValidationError(f"extra key {k!r} collides with a param")
        params[k] = v if isinstance(v, str) else _dumps(v)
    h = obj.get("h")
    if h is not None and (not isinstance(h, str) or not _HEX64.match(h)):
        raise ValidationError("h must be 64 lowercase hex characters")
    parent = obj.get("parent")
    builder.check(obj["t"], obj["comp"], obj["event"], params, parent)
    return LogRecord(seq, obj["t"], obj["comp"], obj["event"], params, parent, h)


def _lines(text: str):
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line.strip():
            yield lineno, line


def parse_log(text: str) -> LogFile:
    """Parse and validate a JSON-lines log. Blank lines are ignored."""
    builder = _Builder()
    chained: bool | None = None
    for lineno, line in _lines(text):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(f"malformed JSON: {e.msg}", lineno, e.colno) from None
        try:
            rec = _record_from_obj(obj, len(builder.records), builder)
        except ValidationError as e:
            raise ParseError(str(e), lineno) from None
        has_h = rec.h is not None
        if chained is None:
            chained = has_h
        elif chained != has_h:
            raise ParseError("mixed chained and unchained records", lineno)
        builder.add(rec)
    return LogFile(tuple(builder.records))


def serialize_log(file: LogFile) -> str:
    return "".join(r.to_line() + "\n" for r in file.records)


def append_record(
    file: LogFile,
    t: int,
    comp: str,
    event: str,
    params: Mapping[str, str] | None = None,
    parent: str | None = None,
) -> LogFile:
    """Return ``file`` with one more chained record."""
    if not file.chained:
        raise ValidationError("cannot append a chained record to an unchained log")
    params = dict(params or {})
    builder = _Builder(file.records)
    builder.check(t, comp, event, params, parent)
    prev = file.records[-1].h if file.records else GENESIS
    rec = LogRecord(len(file.records), t, comp, event, params, parent)
    rec = LogRecord(rec.seq, t, comp, event, params, parent, chain_hash(prev, rec.canonical()))
    return LogFile(file.records + (rec,))


def verify_chain(file: LogFile) -> ChainReport:
    """Recompute every hash and report the first record whose stored hash differs."""
    if not file.chained:
        raise ValidationError("log is not chained")
    prev = GENESIS
    for rec in file.records:
        expected = chain_hash(prev, rec.canonical())
        if rec.h != expected:
            return ChainReport(False, rec.seq, rec.seq, "hash mismatch")
        prev = expected
    return ChainReport(True, None, len(file.records))


def scan_chain(data: bytes | str) -> ChainReport:
    """Verify raw log bytes, treating an unreadable record as the tamper point.

    ``parse_log`` + ``verify_chain`` reject a damaged file outright; this
    variant reports *where* the damage starts, which is what an investigator
    needs. Raises ``ParseError`` when nothing in the input looks chained.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    builder = _Builder()
    prev = GENESIS
    seq = 0
    first_bad: int | None = None
    reason = ""
    any_chained = False
    for lineno, raw in enumerate(data.split(b"\n"), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            obj = None
        if (isinstance(obj, dict) and isinstance(obj.get("h"), str)) or _CHAIN_HINT.search(raw):
            any_chained = True
        if first_bad is None:
            try:
                if obj is None:
                    raise ValidationError("unreadable record")
                rec = _record_from_obj(obj, seq, builder)
                if rec.h is None:
                    raise ValidationError("record is not chained")
                expected = chain_hash(prev, rec.canonical())
                if rec.h != expected:
                    raise ValidationError("hash mismatch")
            except ValidationError as e:
                first_bad, reason = seq, f"{e} (line {lineno})"
            else:
                builder.add(rec)
                prev = expected
        seq += 1
    if seq and not any_chained:
        raise ParseError("not a chained log: no record carries a hash")
    if first_bad is None:
        return ChainReport(True, None, seq)
    return ChainReport(False, first_bad, seq, reason)

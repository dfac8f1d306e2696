"""World and system rules: timed causal laws, state machines, entity map.

Rule files are a sequence of ``;``-terminated declarations::

    # a lane takes about 30 s; the bump ends it
    law wall_lane:system : event(robot,lane_start) ~> event(robot,bump) within [29000,31000];
    law contact:world : event(*,lane_start) ~> event(*,bump) within [0,inf] permitted;

    machine roomba {
        init idle;
        idle -- event(robot,start) --> starting;
        starting -- event(robot,lane_start) --> lane;
    }

    entity operator -> operator agent;

Windows are closed intervals in milliseconds measured from the cause record;
``inf`` leaves the upper end open. A law is ``expected`` (the effect must
follow) unless marked ``permitted``. The ``world``/``system`` label is
descriptive only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ._lexer import Cursor, tokenize
from .errors import ParseError, ValidationError
from .log import LogFile, LogRecord

WILDCARD = "*"
EXPECTED = "expected"
PERMITTED = "permitted"
LABELS = ("world", "system")
ENTITY_KINDS = ("agent", "component", "environment")


@dataclass(frozen=True)
class EventPattern:
    comp: str
    event: str
    constraints: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if self.comp == WILDCARD and self.event == WILDCARD:
            raise ValidationError("pattern needs a concrete component or event")

    def matches(self, record: LogRecord) -> bool:
        if self.comp != WILDCARD and self.comp != record.comp:
            return False
        if self.event != WILDCARD and self.event != record.event:
            return False
        return all(record.params.get(k) == v for k, v in self.constraints)

    def overlaps(self, other: "EventPattern") -> bool:
        """Could one concrete event match both patterns?"""
        if WILDCARD not in (self.comp, other.comp) and self.comp != other.comp:
            return False
        if WILDCARD not in (self.event, other.event) and self.event != other.event:
            return False
        mine = dict(self.constraints)
        return all(mine.get(k, v) == v for k, v in other.constraints)

    def __str__(self) -> str:
        parts = [self.comp, self.event] + [f"{k}={_fmt_value(v)}" for k, v in self.constraints]
        return "event(" + ",".join(parts) + ")"


def match(pattern: EventPattern, record: LogRecord) -> bool:
    return pattern.matches(record)


@dataclass(frozen=True)
class CausalLaw:
    id: str
    cause: EventPattern
    effect: EventPattern
    lo: int
    hi: int | None  # None: unbounded
    modality: str = EXPECTED
    label: str | None = None

    def __post_init__(self) -> None:
        if self.lo < 0 or (self.hi is not None and self.hi < self.lo):
            raise ValidationError(f"invalid window [{self.lo},{self.hi}] in law {self.id}")
        if self.modality not in (EXPECTED, PERMITTED):
            raise ValidationError(f"unknown modality {self.modality!r}")

    def in_window(self, dt: int) -> bool:
        return dt >= self.lo and (self.hi is None or dt <= self.hi)

    @property
    def expected(self) -> bool:
        return self.modality == EXPECTED

    def __str__(self) -> str:
        head = self.id + (f":{self.label}" if self.label else "")
        hi = "inf" if self.hi is None else str(self.hi)
        tail = " permitted" if self.modality == PERMITTED else ""
        return f"law {head} : {self.cause} ~> {self.effect} within [{self.lo},{hi}]{tail};"


@dataclass(frozen=True)
class Transition:
    source: str
    pattern: EventPattern
    target: str


@dataclass(frozen=True)
class StateMachineSpec:
    id: str
    states: tuple[str, ...]
    initial: str
    transitions: tuple[Transition, ...]
    label: str | None = None

    def __post_init__(self) -> None:
        if not self.states:
            raise ValidationError(f"machine {self.id} has no states")
        if self.initial not in self.states:
            raise ValidationError(f"initial state {self.initial} of {self.id} is not a state")
        for tr in self.transitions:
            for s in (tr.source, tr.target):
                if s not in self.states:
                    raise ValidationError(f"unknown state {s} in machine {self.id}")
        for i, a in enumerate(self.transitions):
            for b in self.transitions[i + 1 :]:
                if a.source == b.source and a.pattern.overlaps(b.pattern):
                    raise ValidationError(
                        f"machine {self.id} is nondeterministic in state {a.source}: "
                        f"{a.pattern} and {b.pattern} overlap"
                    )

    def relevant(self, record: LogRecord) -> bool:
        return any(tr.pattern.matches(record) for tr in self.transitions)

    def step(self, state: str, record: LogRecord) -> str | None:
        for tr in self.transitions:
            if tr.source == state and tr.pattern.matches(record):
                return tr.target
        return None

    def __str__(self) -> str:
        head = self.id + (f":{self.label}" if self.label else "")
        lines = [f"machine {head} {{"]
        # the parser orders states by first mention; spell them out when that differs
        mentioned = dict.fromkeys([self.initial] + [s for tr in self.transitions for s in (tr.source, tr.target)])
        if tuple(mentioned) != self.states:
            lines.append("    states " + ", ".join(self.states) + ";")
        lines.append(f"    init {self.initial};")
        for tr in self.transitions:
            lines.append(f"    {tr.source} -- {tr.pattern} --> {tr.target};")
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class Entity:
    name: str
    kind: str = "component"


@dataclass(frozen=True)
class Violation:
    machine: str
    seq: int
    state: str
    record: LogRecord


@dataclass(frozen=True)
class RuleSet:
    laws: tuple[CausalLaw, ...] = ()
    machines: tuple[StateMachineSpec, ...] = ()
    entities: Mapping[str, Entity] = field(default_factory=dict)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for item in (*self.laws, *self.machines):
            if item.id in seen:
                raise ValidationError(f"duplicate rule id {item.id}")
            seen.add(item.id)

    @property
    def agents(self) -> frozenset[str]:
        return frozenset(c for c, e in self.entities.items() if e.kind == "agent")

    def merge(self, other: "RuleSet") -> "RuleSet":
        entities = dict(self.entities)
        for comp, ent in other.entities.items():
            if comp in entities and entities[comp] != ent:
                raise ValidationError(f"conflicting entity mapping for {comp}")
            entities[comp] = ent
        return RuleSet(self.laws + other.laws, self.machines + other.machines, entities)


def merge_rules(rulesets: Iterable[RuleSet]) -> RuleSet:
    out = RuleSet()
    for rs in rulesets:
        out = out.merge(rs)
    return out


def check_conformance(machine: StateMachineSpec, file: LogFile) -> list[Violation]:
    """Run ``machine`` over the records it knows about.

    A record matching some transition pattern but none leaving the current
    state is a violation; the machine then stays where it is.
    """
    state = machine.initial
    out = []
    for rec in file.records:
        if not machine.relevant(rec):
            continue
        nxt = machine.step(state, rec)
        if nxt is None:
            out.append(Violation(machine.id, rec.seq, state, rec))
        else:
            state = nxt
    return out


# ---------------------------------------------------------------------------
# parser

_NAME = r"[A-Za-z_][A-Za-z0-9_.@]*(?:-[A-Za-z0-9_.@]+)*"
_RULE_TOKENS = [
    ("NAME", _NAME),
    ("NUMBER", r"[0-9][A-Za-z0-9_.@]*"),
    ("STRING", r"'[^'\n]*'|\"[^\"\n]*\""),
    ("OP", r"~>|-->|--|->|[{}()\[\],;:=*]"),
]


def _fmt_value(v: str) -> str:
    if re.fullmatch(_NAME, v) or re.fullmatch(r"[0-9][A-Za-z0-9_.@]*", v):
        return v
    return "'" + v + "'"


def _value(cur: Cursor) -> str:
    tok = cur.next()
    if tok.kind in ("NAME", "NUMBER"):
        return tok.text
    if tok.kind == "STRING":
        return tok.text[1:-1]
    raise ParseError(f"expected a value, got {tok.text or 'end of input'!r}", tok.line, tok.col)


def _ident(cur: Cursor, what: str) -> str:
    return cur.expect("NAME", what=what).text


def _pattern(cur: Cursor) -> EventPattern:
    start = cur.expect("NAME", "event", what="'event('")
    cur.expect("OP", "(")
    fields = []
    for _ in range(2):
        if fields:
            cur.expect("OP", ",")
        if cur.accept("OP", "*"):
            fields.append(WILDCARD)
        else:
            fields.append(_value(cur))
    constraints = []
    while cur.accept("OP", ","):
        k = _ident(cur, "parameter name")
        cur.expect("OP", "=")
        constraints.append((k, _value(cur)))
    cur.expect("OP", ")")
    try:
        return EventPattern(fields[0], fields[1], tuple(constraints))
    except ValidationError as e:
        raise ParseError(str(e), start.line, start.col) from None


def _label(cur: Cursor) -> str | None:
    if cur.at("OP", ":") and cur.peek(1).kind == "NAME" and cur.peek(1).text in LABELS:
        if cur.peek(2).kind == "OP" and cur.peek(2).text in (":", "{"):
            cur.next()
            return cur.next().text
    return None


def _int(cur: Cursor) -> int:
    tok = cur.expect("NUMBER", what="integer")
    if not tok.text.isdigit():
        raise ParseError(f"expected an integer number of milliseconds, got {tok.text!r}", tok.line, tok.col)
    return int(tok.text)


def _law(cur: Cursor, kw) -> CausalLaw:
    law_id = _ident(cur, "law id")
    label = _label(cur)
    cur.expect("OP", ":")
    cause = _pattern(cur)
    cur.expect("OP", "~>")
    effect = _pattern(cur)
    cur.expect("NAME", "within", what="'within'")
    cur.expect("OP", "[")
    lo = _int(cur)
    cur.expect("OP", ",")
    hi: int | None
    if cur.accept("NAME", "inf"):
        hi = None
    else:
        hi = _int(cur)
    cur.expect("OP", "]")
    modality = EXPECTED
    if cur.at("NAME") and cur.peek().text in (EXPECTED, PERMITTED):
        modality = cur.next().text
    cur.expect("OP", ";")
    try:
        return CausalLaw(law_id, cause, effect, lo, hi, modality, label)
    except ValidationError as e:
        raise ParseError(str(e), kw.line, kw.col) from None


def _machine(cur: Cursor, kw) -> StateMachineSpec:
    mid = _ident(cur, "machine id")
    label = _label(cur)
    cur.expect("OP", "{")
    initial = None
    states: dict[str, None] = {}
    transitions = []
    while not cur.accept("OP", "}"):
        if cur.accept("NAME", "init"):
            tok = cur.peek()
            if initial is not None:
                raise cur.error(f"machine {mid} declares init twice", tok)
            initial = _ident(cur, "state")
            states.setdefault(initial, None)
        elif cur.accept("NAME", "states"):
            states.setdefault(_ident(cur, "state"), None)
            while cur.accept("OP", ","):
                states.setdefault(_ident(cur, "state"), None)
        else:
            src = _ident(cur, "state or 'init'")
            cur.expect("OP", "--")
            pat = _pattern(cur)
            cur.expect("OP", "-->")
            dst = _ident(cur, "state")
            states.setdefault(src, None)
            states.setdefault(dst, None)
            transitions.append(Transition(src, pat, dst))
        cur.expect("OP", ";")
    cur.accept("OP", ";")
    if initial is None:
        raise ParseError(f"machine {mid} has no init state", kw.line, kw.col)
    try:
        return StateMachineSpec(mid, tuple(states), initial, tuple(transitions), label)
    except ValidationError as e:
        raise ParseError(str(e), kw.line, kw.col) from None


def parse_rules(text: str) -> RuleSet:
    cur = Cursor(tokenize(text, _RULE_TOKENS))
    laws: list[CausalLaw] = []
    machines: list[StateMachineSpec] = []
    entities: dict[str, Entity] = {}
    ids: set[str] = set()
    while not cur.at("EOF"):
        kw = cur.expect("NAME", what="'law', 'machine' or 'entity'")
        if kw.text == "law":
            item = _law(cur, kw)
            laws.append(item)
        elif kw.text == "machine":
            item = _machine(cur, kw)
            machines.append(item)
        elif kw.text == "entity":
            comp = _value(cur)
            cur.expect("OP", "->")
            name = _value(cur)
            kind = "component"
            if cur.at("NAME") and cur.peek().text in ENTITY_KINDS:
                kind = cur.next().text
            cur.expect("OP", ";")
            if comp in entities and entities[comp] != Entity(name, kind):
                raise ParseError(f"conflicting entity mapping for {comp}", kw.line, kw.col)
            entities[comp] = Entity(name, kind)
            continue
        else:
            raise ParseError(f"expected 'law', 'machine' or 'entity', got {kw.text!r}", kw.line, kw.col)
        if item.id in ids:
            raise ParseError(f"duplicate rule id {item.id}", kw.line, kw.col)
        ids.add(item.id)
    return RuleSet(tuple(laws), tuple(machines), entities)


def format_rules(rules: RuleSet) -> str:
    out = [str(law) for law in rules.laws]
    out += [str(m) for m in rules.machines]
    out += [f"entity {_fmt_value(c)} -> {_fmt_value(e.name)} {e.kind};" for c, e in rules.entities.items()]
    return "\n".join(out) + ("\n" if out else "")

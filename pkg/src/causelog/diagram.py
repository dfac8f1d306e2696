"""Causal diagrams over log facts.

Construction:

1. one node per log record;
2. a solid (observed) edge for every ``parent`` link, from the nearest
   earlier record of the parent component, and for every law whose cause
   and effect both occur with the effect inside the window;
3. a dashed (expected) edge for what expected laws predict, including an
   effect that occurred outside its window. An expected edge that coincides
   with an observed one is folded into it.

Law matching pairs each cause record with the earliest in-window effect not
already claimed by an earlier cause of the same law.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .log import LogFile, LogRecord
from .rules import CausalLaw, RuleSet, check_conformance

OBSERVED = "observed"
EXPECTED = "expected"

MISSING_EFFECT = "MissingEffect"
UNEXPLAINED_FACT = "UnexplainedFact"
TIMING_VIOLATION = "TimingViolation"
CONFORMANCE_VIOLATION = "ConformanceViolation"
ANOMALY_KINDS = (MISSING_EFFECT, UNEXPLAINED_FACT, TIMING_VIOLATION, CONFORMANCE_VIOLATION)

PARENT_ORIGIN = "parent"
TIMING_SUFFIX = "(timing)"


@dataclass(frozen=True)
class FactNode:
    seq: int
    label: str


@dataclass(frozen=True)
class DiagramEdge:
    src: int
    dst: int
    kind: str
    origin: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.src >= self.dst:
            raise ValueError(f"edge {self.src}->{self.dst} runs backwards in time")


@dataclass(frozen=True)
class Anomaly:
    kind: str
    rule: str | None
    subjects: tuple[int, ...]
    detail: str

    @property
    def seq(self) -> int:
        return self.subjects[0]

    def sort_key(self) -> tuple:
        return (self.seq, ANOMALY_KINDS.index(self.kind), self.rule or "", self.subjects)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "rule": self.rule, "subjects": list(self.subjects), "detail": self.detail}


@dataclass(frozen=True)
class LawMatch:
    law: CausalLaw
    pairs: tuple[tuple[int, int], ...]
    unmatched: tuple[int, ...]
    # (cause, effect) where the effect occurred but outside the window
    late: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class CausalDiagram:
    nodes: tuple[FactNode, ...]
    edges: tuple[DiagramEdge, ...]
    records: tuple[LogRecord, ...] = field(default=(), compare=False, repr=False)
    agents: frozenset[str] = field(default=frozenset(), compare=False)

    def __len__(self) -> int:
        return len(self.nodes)

    def observed_parents(self, seq: int) -> list[int]:
        return [e.src for e in self.edges if e.dst == seq and e.kind == OBSERVED]

    def backward_closure(self, seq: int) -> set[int]:
        """``seq`` plus every node with an observed path into it."""
        parents: dict[int, list[int]] = defaultdict(list)
        for e in self.edges:
            if e.kind == OBSERVED:
                parents[e.dst].append(e.src)
        seen = {seq}
        stack = [seq]
        while stack:
            for p in parents[stack.pop()]:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen


def node_labels(records) -> list[str]:
    """``comp.event@t``; repeats of the same label get ``_2``, ``_3`` ... appended."""
    counts: dict[str, int] = {}
    out = []
    for r in records:
        base = r.label
        counts[base] = counts.get(base, 0) + 1
        out.append(base if counts[base] == 1 else f"{base}_{counts[base]}")
    return out


def match_law(law: CausalLaw, records: tuple[LogRecord, ...]) -> LawMatch:
    causes = [r for r in records if law.cause.matches(r)]
    effects = [r for r in records if law.effect.matches(r)]
    claimed: set[int] = set()
    pairs, unmatched = [], []
    for c in causes:
        for e in effects:
            if e.seq > c.seq and e.seq not in claimed and law.in_window(e.t - c.t):
                pairs.append((c.seq, e.seq))
                claimed.add(e.seq)
                break
        else:
            unmatched.append(c.seq)
    late = []
    if law.expected:
        cause_seqs = [c.seq for c in causes]
        flagged: set[int] = set()
        for c in unmatched:
            nxt = next((s for s in cause_seqs if s > c), None)
            for e in effects:
                if e.seq <= c or e.seq in claimed or e.seq in flagged:
                    continue
                if nxt is None or e.seq < nxt:
                    late.append((c, e.seq))
                    flagged.add(e.seq)
                break
    return LawMatch(law, tuple(pairs), tuple(unmatched), tuple(late))


def match_laws(file: LogFile, rules: RuleSet) -> list[LawMatch]:
    return [match_law(law, file.records) for law in rules.laws]


def _parent_edges(records) -> list[tuple[int, int]]:
    last: dict[str, int] = {}
    out = []
    for r in records:
        if r.parent is not None:
            out.append((last[r.parent], r.seq))
        last[r.comp] = r.seq
    return out


def build_diagram(file: LogFile, rules: RuleSet, matches: list[LawMatch] | None = None) -> CausalDiagram:
    records = file.records
    labels = node_labels(records)
    nodes = tuple(FactNode(r.seq, labels[r.seq]) for r in records)
    matches = match_laws(file, rules) if matches is None else matches

    origins: dict[tuple[int, int], list[str]] = {}
    observed: set[tuple[int, int]] = set()

    def add(key, origin, is_observed):
        lst = origins.setdefault(key, [])
        if origin not in lst:
            lst.append(origin)
        if is_observed:
            observed.add(key)

    for key in _parent_edges(records):
        add(key, PARENT_ORIGIN, True)
    for m in matches:
        for key in m.pairs:
            add(key, m.law.id, True)
    for m in matches:
        if m.law.expected:
            for key in m.pairs:
                add(key, m.law.id, False)
            for key in m.late:
                add(key, m.law.id + TIMING_SUFFIX, False)

    edges = tuple(
        DiagramEdge(s, d, OBSERVED if (s, d) in observed else EXPECTED, tuple(origins[(s, d)]))
        for s, d in sorted(origins)
    )
    return CausalDiagram(nodes, edges, records, rules.agents)


def detect_anomalies(
    file: LogFile,
    rules: RuleSet,
    diagram: CausalDiagram | None = None,
    matches: list[LawMatch] | None = None,
) -> list[Anomaly]:
    records = file.records
    matches = match_laws(file, rules) if matches is None else matches
    diagram = build_diagram(file, rules, matches) if diagram is None else diagram
    out: list[Anomaly] = []
    timing_subjects: set[int] = set()

    for m in matches:
        if not m.law.expected:
            continue
        late_for = {c: e for c, e in m.late}
        for c in m.unmatched:
            cause = records[c]
            if c in late_for:
                e = records[late_for[c]]
                dt = e.t - cause.t
                hi = "inf" if m.law.hi is None else m.law.hi
                out.append(
                    Anomaly(
                        TIMING_VIOLATION,
                        m.law.id,
                        (e.seq, c),
                        f"{e.comp}.{e.event} came {dt} ms after {cause.comp}.{cause.event} "
                        f"(seq {c}); law {m.law.id} expects [{m.law.lo},{hi}]",
                    )
                )
                timing_subjects.add(e.seq)
            else:
                out.append(
                    Anomaly(
                        MISSING_EFFECT,
                        m.law.id,
                        (c,),
                        f"no {m.law.effect} within the window of law {m.law.id} "
                        f"after {cause.comp}.{cause.event}",
                    )
                )

    # only records some law treats as an effect can be unexplained; completeness
    # is judged relative to the rules, never absolutely
    has_incoming = {e.dst for e in diagram.edges if e.kind == OBSERVED}
    for r in records:
        if r.seq in has_incoming or r.comp in rules.agents or r.seq in timing_subjects:
            continue
        if not any(law.effect.matches(r) for law in rules.laws):
            continue
        out.append(
            Anomaly(UNEXPLAINED_FACT, None, (r.seq,), f"nothing in the log or rules explains {r.comp}.{r.event}")
        )

    for machine in rules.machines:
        for v in check_conformance(machine, file):
            out.append(
                Anomaly(
                    CONFORMANCE_VIOLATION,
                    machine.id,
                    (v.seq,),
                    f"machine {machine.id} in state {v.state} has no transition for "
                    f"{v.record.comp}.{v.record.event}",
                )
            )
    out.sort(key=Anomaly.sort_key)
    return out


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(diagram: CausalDiagram, anomalies: list[Anomaly] = ()) -> str:
    """Graphviz text. Observed edges solid, expected-only edges dashed,
    anomalous nodes drawn red with their anomaly kinds attached."""
    flagged: dict[int, list[str]] = defaultdict(list)
    for a in anomalies:
        if a.kind not in flagged[a.seq]:
            flagged[a.seq].append(a.kind)
    lines = ["digraph G {", "  rankdir=LR;", '  node [shape=box, fontname="Helvetica"];']
    for n in diagram.nodes:
        attrs = [f"label={_quote(n.label)}"]
        if n.seq in flagged:
            attrs += ["color=red", "penwidth=2", f"xlabel={_quote(','.join(flagged[n.seq]))}"]
        lines.append(f"  n{n.seq} [{', '.join(attrs)}];")
    for e in diagram.edges:
        attrs = [f"label={_quote('+'.join(e.origin))}"]
        if e.kind == EXPECTED:
            attrs.append("style=dashed")
        lines.append(f"  n{e.src} -> n{e.dst} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"

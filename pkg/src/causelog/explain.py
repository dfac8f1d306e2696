"""Explanations: root causes, actual causes over the lifted model, suspects.

The lifting turns a causal diagram into a binary structural model: each fact
is a variable that is 1 when any of its observed causes is 1. Source facts get
their own exogenous driver, and facts flagged as unexplained or
non-conforming get an extra ``bg.`` input standing for influences the log
never captured. In the actual context all drivers are 1 and all background
inputs 0, so every logged fact evaluates to 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .actual_cause import DEFAULT_MAX_SIZE, ActualCause, find_actual_causes
from .diagram import (
    CONFORMANCE_VIOLATION,
    OBSERVED,
    TIMING_VIOLATION,
    UNEXPLAINED_FACT,
    Anomaly,
    CausalDiagram,
    build_diagram,
    detect_anomalies,
    match_laws,
)
from .errors import ValidationError
from .log import LogFile
from .rules import Entity, RuleSet
from .scm import Atom, CausalModel

ATTACKER = "unknown-attacker"
# anomalies that put the component that produced the record under suspicion
TRIAGE_KINDS = (UNEXPLAINED_FACT, CONFORMANCE_VIOLATION, TIMING_VIOLATION)
BACKGROUND_KINDS = (UNEXPLAINED_FACT, CONFORMANCE_VIOLATION)


def manufacturer_of(comp: str) -> str:
    return f"manufacturer-of-{comp}"


@dataclass(frozen=True)
class Evidence:
    seq: int
    reason: str  # "root" or an anomaly kind

    def __str__(self) -> str:
        return f"{self.reason}@{self.seq}"


@dataclass(frozen=True)
class Suspect:
    entity: str
    evidence: tuple[Evidence, ...]

    def to_dict(self) -> dict:
        return {"entity": self.entity, "evidence": [{"seq": e.seq, "reason": e.reason} for e in self.evidence]}


@dataclass(frozen=True)
class Explanation:
    target: int
    target_label: str
    root_causes: list[tuple[int, ...]]
    hp_causes: list[ActualCause]
    anomalies: list[Anomaly]
    suspects: list[Suspect]
    unmapped: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    labels: Mapping[int, str] = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "target": {"seq": self.target, "label": self.target_label},
            "root_causes": [list(s) for s in self.root_causes],
            "hp_causes": [c.to_dict() for c in self.hp_causes],
            "anomalies": [a.to_dict() for a in self.anomalies],
            "suspects": [s.to_dict() for s in self.suspects],
            "unmapped_components": list(self.unmapped),
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lab = self.labels
        out = [f"Explanation for seq {self.target} ({self.target_label})", ""]
        out.append("Root causes (observed chains traced back to their origin):")
        for i, s in enumerate(self.root_causes):
            head = "origins" if i == 0 else "chain ends at"
            out.append(f"  {head}: " + ", ".join(f"{q} {lab.get(q, '')}".rstrip() for q in s))
        out.append("")
        if self.anomalies:
            out.append("Anomalies:")
            for a in self.anomalies:
                out.append(f"  [{a.kind}] seq {a.seq}: {a.detail}")
        else:
            out.append("Anomalies: none")
        out.append("")
        if self.hp_causes:
            out.append("Actual causes in the lifted model:")
            for c in self.hp_causes:
                cand = " & ".join(f"{k}={v}" for k, v in c.candidate.items())
                w = ", ".join(c.verdict.witness or ()) or "none"
                out.append(f"  {cand}  (holding fixed: {w})")
        else:
            out.append("Actual causes in the lifted model: none")
        out.append("")
        out.append("Suspects (most supporting evidence first):")
        for i, s in enumerate(self.suspects, start=1):
            ev = ", ".join(str(e) for e in s.evidence)
            out.append(f"  {i}. {s.entity}: {ev}")
        if not self.suspects:
            out.append("  none")
        if self.unmapped:
            out += ["", "Components with no entity mapping: " + ", ".join(self.unmapped)]
        for note in self.notes:
            out += ["", f"Note: {note}"]
        return "\n".join(out) + "\n"


def _check_target(diagram: CausalDiagram, target: int) -> None:
    if not isinstance(target, int) or not 0 <= target < len(diagram.nodes):
        raise ValidationError(f"unknown target seq {target}")


def root_causes(diagram: CausalDiagram, target: int) -> list[tuple[int, ...]]:
    """Follow observed edges back from ``target``.

    The first set holds every source (fact with no observed cause) in the
    backward closure. When some of those sources are not agent actions, the
    chain ends inside the system; those frontier facts are repeated as a
    second set so the report can single them out.
    """
    _check_target(diagram, target)
    closure = diagram.backward_closure(target)
    has_parent = {e.dst for e in diagram.edges if e.kind == OBSERVED}
    sources = tuple(sorted(s for s in closure if s not in has_parent))
    out = [sources]
    if diagram.records:
        frontier = tuple(s for s in sources if diagram.records[s].comp not in diagram.agents)
        if frontier and frontier != sources:
            out.append(frontier)
    return out


def driver_name(label: str) -> str:
    return f"u.{label}"


def background_name(label: str) -> str:
    return f"bg.{label}"


def _any_one(*vals: str) -> str:
    return "1" if "1" in vals else "0"


def to_scm(diagram: CausalDiagram, anomalies: Sequence[Anomaly] = ()) -> tuple[CausalModel, dict[str, str]]:
    """Lift ``diagram`` into a binary causal model and its actual context."""
    if not diagram.nodes:
        raise ValidationError("cannot lift an empty diagram")
    labels = {n.seq: n.label for n in diagram.nodes}
    parents: dict[int, list[int]] = {n.seq: [] for n in diagram.nodes}
    for e in diagram.edges:
        if e.kind == OBSERVED:
            parents[e.dst].append(e.src)
    flagged = {a.seq for a in anomalies if a.kind in BACKGROUND_KINDS}

    exogenous: dict[str, tuple[str, str]] = {}
    endogenous = []
    context: dict[str, str] = {}
    for n in diagram.nodes:
        inputs = [labels[p] for p in sorted(parents[n.seq])]
        if not parents[n.seq]:
            u = driver_name(n.label)
            exogenous[u] = ("0", "1")
            context[u] = "1"
            inputs.append(u)
        if n.seq in flagged:
            b = background_name(n.label)
            exogenous[b] = ("0", "1")
            context[b] = "0"
            inputs.append(b)
        endogenous.append((n.label, ("0", "1"), inputs, _any_one))
    return CausalModel.from_functions(exogenous, endogenous), context


def entity_of(comp: str, entity_map: Mapping[str, Entity]) -> Entity | None:
    return entity_map.get(comp)


def suspects(
    diagram: CausalDiagram,
    anomalies: Sequence[Anomaly],
    root_sets: Sequence[Sequence[int]],
    entity_map: Mapping[str, Entity],
) -> list[Suspect]:
    """Rank the entities implicated by root causes and anomalies.

    A root fact implicates its component's entity; an unmapped technical
    component implicates its manufacturer. An anomaly on a technical
    component implicates the mapped entity (if any), its manufacturer and an
    unknown attacker. Ranking: most evidence first, then by name.
    """
    evidence: dict[str, list[Evidence]] = {}

    def add(name: str, ev: Evidence) -> None:
        lst = evidence.setdefault(name, [])
        if ev not in lst:
            lst.append(ev)

    records = diagram.records
    roots = sorted({s for rs in root_sets for s in rs})
    for seq in roots:
        comp = records[seq].comp
        ent = entity_of(comp, entity_map)
        add(ent.name if ent else manufacturer_of(comp), Evidence(seq, "root"))

    for a in anomalies:
        if a.kind not in TRIAGE_KINDS:
            continue
        comp = records[a.seq].comp
        ent = entity_of(comp, entity_map)
        ev = Evidence(a.seq, a.kind)
        if ent is not None and ent.kind == "agent":
            add(ent.name, ev)
            continue
        if ent is not None:
            add(ent.name, ev)
        add(manufacturer_of(comp), ev)
        add(ATTACKER, ev)

    ranked = sorted(evidence.items(), key=lambda kv: (-len(kv[1]), kv[0]))
    return [Suspect(name, tuple(sorted(evs, key=lambda e: (e.seq, e.reason)))) for name, evs in ranked]


def explain(
    file: LogFile,
    rules: RuleSet,
    target: int,
    max_size: int = DEFAULT_MAX_SIZE,
    *,
    backend: str | None = None,
) -> Explanation:
    matches = match_laws(file, rules)
    diagram = build_diagram(file, rules, matches)
    _check_target(diagram, target)
    anomalies = detect_anomalies(file, rules, diagram, matches)
    roots = root_causes(diagram, target)
    model, context = to_scm(diagram, anomalies)
    label = diagram.nodes[target].label
    notes = []
    causes = find_actual_causes(model, context, Atom(label, "1"), max_size, backend=backend)
    if not causes:
        notes.append("the target does not hold in the lifted model; no actual causes")
    ranked = suspects(diagram, anomalies, roots, rules.entities)
    unmapped = [c for c in file.components if c not in rules.entities]
    return Explanation(
        target,
        label,
        roots,
        causes,
        anomalies,
        ranked,
        unmapped,
        notes,
        {n.seq: n.label for n in diagram.nodes},
    )

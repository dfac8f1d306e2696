"""Hypothesis strategies shared by the property tests."""

from __future__ import annotations

from itertools import product

from hypothesis import strategies as st

from causelog.log import LogFile, append_record
from causelog.rules import CausalLaw, Entity, EventPattern, RuleSet, StateMachineSpec, Transition
from causelog.scm import CausalModel, Equation, Variable


@st.composite
def models(draw, max_exo=2, max_endo=5, max_parents=3, max_domain=3, binary=False):
    """Random acyclic models; each variable only reads variables declared before it."""
    n_exo = draw(st.integers(1, max_exo))
    n_endo = draw(st.integers(1, max_endo))
    variables = []
    for i in range(n_exo + n_endo):
        size = 2 if binary else draw(st.integers(2, max_domain))
        name = f"U{i}" if i < n_exo else f"V{i - n_exo}"
        variables.append(Variable(name, tuple(str(k) for k in range(size)), i < n_exo))
    equations = {}
    for i in range(n_exo, len(variables)):
        earlier = [v.name for v in variables[:i]]
        parents = draw(
            st.lists(st.sampled_from(earlier), unique=True, max_size=min(max_parents, len(earlier)))
        )
        doms = {v.name: v.domain for v in variables}
        target = variables[i]
        rows = list(product(*(doms[p] for p in parents)))
        outs = draw(st.lists(st.sampled_from(target.domain), min_size=len(rows), max_size=len(rows)))
        equations[target.name] = Equation(target.name, tuple(parents), dict(zip(rows, outs)))
    return CausalModel(variables, equations)


@st.composite
def model_and_context(draw, **kw):
    m = draw(models(**kw))
    ctx = {u: draw(st.sampled_from(m.domain(u))) for u in m.exogenous}
    return m, ctx


_names = st.sampled_from(["robot", "pilot", "fc", "imu", "cam"])
_events = st.sampled_from(["start", "bump", "move", "lane_start", "altitude"])
_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\n"), max_size=6
)


@st.composite
def chained_logs(draw, min_size=1, max_size=8):
    file = LogFile(())
    t = 0
    for _ in range(draw(st.integers(min_size, max_size))):
        t += draw(st.integers(0, 5000))
        comp = draw(_names)
        params = draw(st.dictionaries(st.sampled_from(["dir", "lane", "alt", "k"]), _text, max_size=2))
        seen = sorted({r.comp for r in file.records})
        parent = draw(st.one_of(st.none(), st.sampled_from(seen))) if seen else None
        file = append_record(file, t, comp, draw(_events), params, parent)
    return file



@st.composite
def event_patterns(draw):
    comp = draw(st.one_of(st.just("*"), _names))
    event = draw(_events) if comp == "*" else draw(st.one_of(st.just("*"), _events))
    return EventPattern(comp, event)


@st.composite
def rule_sets(draw):
    """Laws and at most one machine over the vocabulary of ``chained_logs``."""
    laws = []
    for i in range(draw(st.integers(0, 4))):
        lo = draw(st.integers(0, 6000))
        hi = draw(st.one_of(st.none(), st.integers(lo, lo + 8000)))
        laws.append(
            CausalLaw(f"l{i}", draw(event_patterns()), draw(event_patterns()), lo, hi,
                      draw(st.sampled_from(["expected", "permitted"])))
        )
    machines = ()
    if draw(st.booleans()):
        events = draw(st.lists(_events, unique=True, min_size=1, max_size=3))
        trs = tuple(
            Transition(draw(st.sampled_from(["a", "b"])), EventPattern("robot", e), draw(st.sampled_from(["a", "b"])))
            for e in events
        )
        machines = (StateMachineSpec("m", ("a", "b"), "a", trs),)
    agents = draw(st.lists(_names, unique=True, max_size=2))
    return RuleSet(tuple(laws), machines, {a: Entity(a, "agent") for a in agents})

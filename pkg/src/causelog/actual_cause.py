"""But-for and (modified) Halpern-Pearl actual causes, by exhaustive search.

A candidate ``X = x`` is an actual cause of ``phi`` in ``(M, u)`` when

* AC1: ``X = x`` and ``phi`` both hold in the actual world;
* AC2: some alternative ``x'`` together with a set ``W`` of other endogenous
  variables frozen at their *actual* values makes ``phi`` false;
* AC3: no strict sub-assignment of ``X = x`` satisfies AC1 and AC2.

Freezing a variable that ``X`` cannot influence, or that cannot influence
``phi``, never changes the outcome, so the witness search only ranges over
variables on a path from ``X`` to ``phi``. The smallest witness (and its
position in lexicographic order) is unaffected by that restriction.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Mapping

from . import scm
from ._kernels import OP_AND, OP_ATOM, OP_NOT, OP_OR, make_kernel
from .errors import ValidationError
from .scm import CausalModel, Formula

log = logging.getLogger(__name__)

DEFAULT_MAX_SIZE = 3


@dataclass(frozen=True)
class CauseVerdict:
    is_cause: bool
    witness: tuple[str, ...] | None = None
    alt_assignment: dict[str, str] | None = None
    failed_condition: str | None = None

    def to_dict(self) -> dict:
        if self.is_cause:
            return {
                "is_cause": True,
                "witness": list(self.witness or ()),
                "alt_assignment": dict(self.alt_assignment or {}),
            }
        return {"is_cause": False, "failed_condition": self.failed_condition}


@dataclass(frozen=True)
class ActualCause:
    """A candidate ``X = x`` that passed ``is_actual_cause``, with its verdict."""

    candidate: dict[str, str]
    verdict: CauseVerdict

    def to_dict(self) -> dict:
        return {"candidate": dict(self.candidate), **self.verdict.to_dict()}


def compile_formula(model: CausalModel, formula: Formula) -> list[tuple[int, int, int]]:
    """Flatten ``formula`` into the kernels' postfix program."""
    pos = {n: i for i, n in enumerate(model.names)}
    prog: list[tuple[int, int, int]] = []

    def emit(f: Formula) -> None:
        if isinstance(f, scm.Atom):
            prog.append((OP_ATOM, pos[f.var], model.domain(f.var).index(f.value)))
        elif isinstance(f, scm.Not):
            emit(f.arg)
            prog.append((OP_NOT, 0, 0))
        elif isinstance(f, (scm.And, scm.Or)):
            for a in f.args:
                emit(a)
            prog.append((OP_AND if isinstance(f, scm.And) else OP_OR, len(f.args), 0))
        else:
            raise TypeError(f"unsupported formula node {f!r}")

    emit(formula)
    return prog


class CauseSearch:
    """Shared state for repeated cause queries against one ``(M, u, phi)``."""

    def __init__(
        self,
        model: CausalModel,
        context: Mapping[str, object],
        formula: Formula | str,
        backend: str | None = None,
    ):
        if isinstance(formula, str):
            formula = scm.parse_formula(formula)
        self.model = model
        self.formula = model.check_formula(formula)
        self.context = model.check_context(context)
        self.actual = scm.evaluate(model, self.context)
        self.holds = self.formula.holds(self.actual)
        self.kernel = make_kernel(model.compiled, backend)
        self._pos = {n: i for i, n in enumerate(model.names)}
        self._actual_idx = [model.domain(n).index(self.actual[n]) for n in model.names]
        self._prog = compile_formula(model, self.formula)
        self._relevant = model.ancestors(self.formula.variables()) | set(self.formula.variables())
        self._ac2_memo: dict[tuple[str, ...], tuple[dict[str, str], tuple[str, ...]] | None] = {}

    def check_candidate(self, candidate: Mapping[str, object]) -> dict[str, str]:
        if not candidate:
            raise ValidationError("candidate cause must name at least one variable")
        fixed = self.model.check_intervention(candidate)
        # declaration order makes memo keys and outputs canonical
        return {n: fixed[n] for n in self.model.names if n in fixed}

    def ac1(self, candidate: Mapping[str, str]) -> bool:
        return self.holds and all(self.actual[k] == v for k, v in candidate.items())

    def ac2(self, xs: tuple[str, ...], max_w: int | None = None):
        """Witness ``(alt assignment, W)`` for variables ``xs`` or ``None``."""
        key = xs if max_w is None else xs + (f"#{max_w}",)
        if key in self._ac2_memo:
            return self._ac2_memo[key]
        model = self.model
        x_idx = [self._pos[n] for n in xs]
        actual_row = tuple(self._actual_idx[i] for i in x_idx)
        alts = [
            row
            for row in itertools.product(*(range(len(model.domain(n))) for n in xs))
            if row != actual_row
        ]
        pool_names = (model.descendants(xs) & self._relevant) - set(xs)
        pool = sorted(self._pos[n] for n in pool_names)
        limit = len(pool) if max_w is None else max_w
        hit = self.kernel.find_witness(self._actual_idx, x_idx, alts, pool, limit, self._prog)
        result = None
        if hit is not None:
            r, w = hit
            alt = {n: model.domain(n)[v] for n, v in zip(xs, alts[r])}
            result = (alt, tuple(model.names[i] for i in w))
        self._ac2_memo[key] = result
        return result

    def but_for(self, candidate: Mapping[str, object]) -> bool:
        cand = self.check_candidate(candidate)
        return self.ac1(cand) and self.ac2(tuple(cand), max_w=0) is not None

    def verdict(self, candidate: Mapping[str, object]) -> CauseVerdict:
        cand = self.check_candidate(candidate)
        if not self.ac1(cand):
            return CauseVerdict(False, failed_condition="AC1")
        xs = tuple(cand)
        hit = self.ac2(xs)
        if hit is None:
            return CauseVerdict(False, failed_condition="AC2")
        for k in range(1, len(xs)):
            for sub in itertools.combinations(xs, k):
                if self.ac2(sub) is not None:
                    return CauseVerdict(False, failed_condition="AC3")
        alt, w = hit
        return CauseVerdict(True, witness=w, alt_assignment=alt)

    def find(self, max_size: int = DEFAULT_MAX_SIZE) -> list[ActualCause]:
        if max_size < 1:
            raise ValueError("max_size must be a positive integer")
        if not self.holds:
            log.info("formula %s does not hold in the actual world; no causes", self.formula)
            return []
        found: list[ActualCause] = []
        found_sets: list[frozenset[str]] = []
        endo = self.model.endogenous
        for k in range(1, min(max_size, len(endo)) + 1):
            for xs in itertools.combinations(endo, k):
                s = frozenset(xs)
                # a superset of a cause fails AC3; a non-cause subset cannot help
                if any(c <= s for c in found_sets):
                    continue
                hit = self.ac2(xs)
                if hit is None:
                    continue
                alt, w = hit
                found.append(
                    ActualCause(
                        {n: self.actual[n] for n in xs},
                        CauseVerdict(True, witness=w, alt_assignment=alt),
                    )
                )
                found_sets.append(s)
        return found


def is_but_for_cause(model, context, candidate, formula, *, backend=None) -> bool:
    return CauseSearch(model, context, formula, backend).but_for(candidate)


def is_actual_cause(model, context, candidate, formula, *, backend=None) -> CauseVerdict:
    return CauseSearch(model, context, formula, backend).verdict(candidate)


def find_actual_causes(
    model, context, formula, max_size: int = DEFAULT_MAX_SIZE, *, backend=None
) -> list[ActualCause]:
    """All minimal actual causes of ``formula`` with at most ``max_size`` conjuncts,
    ordered by size and then declaration order."""
    return CauseSearch(model, context, formula, backend).find(max_size)


def replay(model: CausalModel, context, verdict: CauseVerdict, formula: Formula | str) -> bool:
    """True when the verdict's witness really falsifies ``formula``.

    Rebuilds the intervention ``x' + (W <- actual values)`` and checks it with
    ``scm.satisfies``, independently of the search kernel.
    """
    if not verdict.is_cause:
        raise ValueError("only positive verdicts carry a witness")
    if isinstance(formula, str):
        formula = scm.parse_formula(formula)
    actual = scm.evaluate(model, context)
    intervention = dict(verdict.alt_assignment or {})
    intervention.update({w: actual[w] for w in verdict.witness or ()})
    return scm.satisfies(model, context, intervention, scm.Not(formula))

"""Finite-domain structural causal models.

A model is a set of exogenous variables (set from outside by a context), a set
of endogenous variables, and one structural equation per endogenous variable.
Equations are stored as total lookup tables over the parents' domains, so every
evaluation is a chain of dictionary lookups in topological order.

Values are string tokens throughout (``"0"``, ``"1"``, ``"left"``, ``"25m"``).
Integers passed to the public functions are converted with ``str``.
"""

from __future__ import annotations

import heapq
import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Sequence

from ._lexer import Cursor, Token, tokenize
from .errors import ParseError, ValidationError

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.@]*\Z")
VALUE_RE = re.compile(r"[A-Za-z0-9_.@+\-]+\Z")
BOOL_DOMAIN = ("0", "1")
RESERVED = frozenset({"exo", "var"})


def _tok(value: object) -> str:
    return value if isinstance(value, str) else str(value)


def check_name(name: str) -> str:
    if not isinstance(name, str) or not NAME_RE.match(name):
        raise ValidationError(f"invalid variable name {name!r}")
    return name


@dataclass(frozen=True)
class Variable:
    name: str
    domain: tuple[str, ...]
    exogenous: bool = False

    def __post_init__(self) -> None:
        check_name(self.name)
        if not self.domain:
            raise ValidationError(f"empty domain for {self.name}")
        if len(set(self.domain)) != len(self.domain):
            raise ValidationError(f"duplicate values in domain of {self.name}")
        for v in self.domain:
            if not VALUE_RE.match(v):
                raise ValidationError(f"invalid value token {v!r} in domain of {self.name}")


@dataclass(frozen=True)
class Equation:
    """Structural equation ``target = table[parent values]``."""

    target: str
    parents: tuple[str, ...]
    table: Mapping[tuple[str, ...], str] = field(compare=True)

    def __call__(self, values: Mapping[str, str]) -> str:
        return self.table[tuple(values[p] for p in self.parents)]

    @classmethod
    def constant(cls, target: str, value: str) -> "Equation":
        return cls(target, (), {(): value})


# ---------------------------------------------------------------------------
# formulas


class Formula:
    """Boolean combination of primitive events ``Var = value``."""

    def holds(self, values: Mapping[str, str]) -> bool:
        raise NotImplementedError

    def atoms(self) -> Iterator["Atom"]:
        raise NotImplementedError

    def variables(self) -> list[str]:
        seen: dict[str, None] = {}
        for a in self.atoms():
            seen.setdefault(a.var, None)
        return list(seen)


@dataclass(frozen=True)
class Atom(Formula):
    var: str
    value: str

    def holds(self, values: Mapping[str, str]) -> bool:
        return values[self.var] == self.value

    def atoms(self) -> Iterator["Atom"]:
        yield self

    def __str__(self) -> str:
        return f"{self.var}={self.value}"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def holds(self, values: Mapping[str, str]) -> bool:
        return not self.arg.holds(values)

    def atoms(self) -> Iterator[Atom]:
        return self.arg.atoms()

    def __str__(self) -> str:
        inner = str(self.arg)
        return f"!{inner}" if isinstance(self.arg, (Atom, Not)) else f"!({inner})"


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    def holds(self, values: Mapping[str, str]) -> bool:
        return all(a.holds(values) for a in self.args)

    def atoms(self) -> Iterator[Atom]:
        for a in self.args:
            yield from a.atoms()

    def __str__(self) -> str:
        return " & ".join(f"({a})" if isinstance(a, Or) else str(a) for a in self.args)


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def holds(self, values: Mapping[str, str]) -> bool:
        return any(a.holds(values) for a in self.args)

    def atoms(self) -> Iterator[Atom]:
        for a in self.args:
            yield from a.atoms()

    def __str__(self) -> str:
        return " | ".join(str(a) for a in self.args)


def conjunction(assignment: Mapping[str, object]) -> Formula:
    atoms = tuple(Atom(k, _tok(v)) for k, v in assignment.items())
    return atoms[0] if len(atoms) == 1 else And(atoms)


_FORMULA_TOKENS = [
    ("NAME", r"[A-Za-z_][A-Za-z0-9_.@]*"),
    ("VALUE", r"[0-9+\-][A-Za-z0-9_.@+\-]*"),
    ("STRING", r"'[^'\n]*'|\"[^\"\n]*\""),
    ("OP", r"==|!=|&&|\|\||[=!&|()]"),
]


def parse_formula(text: str) -> Formula:
    """Parse ``A=1 & !(B=0 | C != 1)``.

    ``=`` and ``==`` are synonyms; ``&&``/``||`` are accepted for ``&``/``|``.
    """
    cur = Cursor(tokenize(text, _FORMULA_TOKENS))
    if cur.at("EOF"):
        raise cur.error("empty formula")
    f = _parse_or(cur)
    if not cur.at("EOF"):
        raise cur.error(f"unexpected {cur.peek().text!r}")
    return f


def _parse_or(cur: Cursor) -> Formula:
    args = [_parse_and(cur)]
    while cur.accept("OP", "|") or cur.accept("OP", "||"):
        args.append(_parse_and(cur))
    return args[0] if len(args) == 1 else Or(tuple(args))


def _parse_and(cur: Cursor) -> Formula:
    args = [_parse_unary(cur)]
    while cur.accept("OP", "&") or cur.accept("OP", "&&"):
        args.append(_parse_unary(cur))
    return args[0] if len(args) == 1 else And(tuple(args))


def _parse_unary(cur: Cursor) -> Formula:
    if cur.accept("OP", "!"):
        return Not(_parse_unary(cur))
    if cur.accept("OP", "("):
        f = _parse_or(cur)
        cur.expect("OP", ")")
        return f
    name = cur.expect("NAME", what="variable name").text
    op = cur.peek()
    if op.kind == "OP" and op.text in ("=", "==", "!="):
        cur.next()
    else:
        raise cur.error("expected '=' or '!=' after variable name")
    value = _parse_value_token(cur)
    atom = Atom(name, value)
    return Not(atom) if op.text == "!=" else atom


def _parse_value_token(cur: Cursor) -> str:
    tok = cur.next()
    if tok.kind in ("NAME", "VALUE"):
        return tok.text
    if tok.kind == "STRING":
        return tok.text[1:-1]
    raise ParseError(f"expected a value, got {tok.text or 'end of input'!r}", tok.line, tok.col)


# ---------------------------------------------------------------------------
# the model


class CompiledModel(NamedTuple):
    """Integer-coded model used by the search kernels.

    Variable ``i`` is the i-th declared variable; values are domain indices.
    ``order`` lists endogenous variables topologically; position ``p`` has
    parents ``par_idx[par_ptr[p]:par_ptr[p+1]]`` (mixed-radix ``par_stride``)
    and its table starts at ``table[tab_ptr[p]]``.
    """

    names: tuple[str, ...]
    domains: tuple[tuple[str, ...], ...]
    order: tuple[int, ...]
    par_ptr: tuple[int, ...]
    par_idx: tuple[int, ...]
    par_stride: tuple[int, ...]
    tab_ptr: tuple[int, ...]
    table: tuple[int, ...]


class CausalModel:
    """A recursive structural causal model over finite domains.

    ``variables`` keeps declaration order; every iteration in this package
    follows it, which is what makes outputs reproducible.
    """

    __slots__ = ("variables", "equations", "_index", "__dict__")

    def __init__(self, variables: Iterable[Variable], equations: Mapping[str, Equation]):
        self.variables: tuple[Variable, ...] = tuple(variables)
        self._index = {v.name: v for v in self.variables}
        if len(self._index) != len(self.variables):
            names = [v.name for v in self.variables]
            dup = next(n for n in names if names.count(n) > 1)
            raise ValidationError(f"duplicate variable {dup}")
        endo = [v.name for v in self.variables if not v.exogenous]
        missing = [n for n in endo if n not in equations]
        if missing:
            raise ValidationError(f"no equation for endogenous variable {missing[0]}")
        extra = [n for n in equations if n not in self._index or self._index[n].exogenous]
        if extra:
            raise ValidationError(f"equation for non-endogenous variable {extra[0]}")
        self.equations: dict[str, Equation] = {n: equations[n] for n in endo}
        for eq in self.equations.values():
            self._check_equation(eq)
        self.topological_order  # raises on cycles

    def _check_equation(self, eq: Equation) -> None:
        for p in eq.parents:
            if p not in self._index:
                raise ValidationError(f"undeclared parent {p} in equation for {eq.target}")
        if len(set(eq.parents)) != len(eq.parents):
            raise ValidationError(f"repeated parent in equation for {eq.target}")
        target_dom = set(self._index[eq.target].domain)
        rows = list(itertools.product(*(self._index[p].domain for p in eq.parents)))
        for row in rows:
            if row not in eq.table:
                shown = ", ".join(f"{p}={v}" for p, v in zip(eq.parents, row))
                raise ValidationError(f"table for {eq.target} is not total: missing row ({shown})")
            if eq.table[row] not in target_dom:
                raise ValidationError(
                    f"value {eq.table[row]!r} not in domain of {eq.target}"
                )
        if len(eq.table) != len(rows):
            raise ValidationError(f"table for {eq.target} has rows outside the parent domains")

    # -- lookups -----------------------------------------------------------

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __getitem__(self, name: str) -> Variable:
        try:
            return self._index[name]
        except KeyError:
            raise ValidationError(f"unknown variable {name}") from None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CausalModel):
            return NotImplemented
        return self.variables == other.variables and self.equations == other.equations

    def __repr__(self) -> str:
        return (
            f"CausalModel(exogenous={list(self.exogenous)}, "
            f"endogenous={list(self.endogenous)})"
        )

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def exogenous(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables if v.exogenous)

    @property
    def endogenous(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables if not v.exogenous)

    def domain(self, name: str) -> tuple[str, ...]:
        return self[name].domain

    def position(self, name: str) -> int:
        return self.names.index(name)

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        """Endogenous variables, parents first; ties broken by declaration order."""
        pos = {n: i for i, n in enumerate(self.names)}
        indeg: dict[str, int] = {}
        children: dict[str, list[str]] = {n: [] for n in self.endogenous}
        for n, eq in self.equations.items():
            endo_parents = [p for p in eq.parents if not self._index[p].exogenous]
            indeg[n] = len(endo_parents)
            for p in endo_parents:
                children[p].append(n)
        heap = [(pos[n], n) for n, d in indeg.items() if d == 0]
        heapq.heapify(heap)
        out: list[str] = []
        while heap:
            _, n = heapq.heappop(heap)
            out.append(n)
            for c in children[n]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(heap, (pos[c], c))
        if len(out) != len(indeg):
            stuck = [n for n in self.endogenous if n not in set(out)]
            raise ValidationError("cycle detected among: " + ", ".join(stuck))
        return tuple(out)

    @cached_property
    def children(self) -> dict[str, tuple[str, ...]]:
        kids: dict[str, list[str]] = {n: [] for n in self.names}
        for n in self.endogenous:
            for p in self.equations[n].parents:
                kids[p].append(n)
        return {n: tuple(k) for n, k in kids.items()}

    def descendants(self, names: Iterable[str]) -> set[str]:
        """Variables reachable from ``names`` (excluding the start set unless re-reached)."""
        seen: set[str] = set()
        stack = list(names)
        while stack:
            for c in self.children[stack.pop()]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return seen

    def ancestors(self, names: Iterable[str]) -> set[str]:
        seen: set[str] = set()
        stack = list(names)
        while stack:
            n = stack.pop()
            if n in self.equations:
                for p in self.equations[n].parents:
                    if p not in seen:
                        seen.add(p)
                        stack.append(p)
        return seen

    @cached_property
    def compiled(self) -> CompiledModel:
        names = self.names
        idx = {n: i for i, n in enumerate(names)}
        vidx = [{v: j for j, v in enumerate(var.domain)} for var in self.variables]
        order, par_ptr, par_idx, par_stride, tab_ptr, table = [], [0], [], [], [], []
        for n in self.topological_order:
            eq = self.equations[n]
            i = idx[n]
            order.append(i)
            strides = []
            s = 1
            for p in reversed(eq.parents):
                strides.append(s)
                s *= len(self._index[p].domain)
            strides.reverse()
            par_idx.extend(idx[p] for p in eq.parents)
            par_stride.extend(strides)
            par_ptr.append(len(par_idx))
            tab_ptr.append(len(table))
            for row in itertools.product(*(self._index[p].domain for p in eq.parents)):
                table.append(vidx[i][eq.table[row]])
        return CompiledModel(
            names,
            tuple(v.domain for v in self.variables),
            tuple(order),
            tuple(par_ptr),
            tuple(par_idx),
            tuple(par_stride),
            tuple(tab_ptr),
            tuple(table),
        )

    # -- validation of inputs ------------------------------------------------

    def check_context(self, context: Mapping[str, object]) -> dict[str, str]:
        ctx = {k: _tok(v) for k, v in context.items()}
        for k in ctx:
            if k not in self._index:
                raise ValidationError(f"context names unknown variable {k}")
            if not self._index[k].exogenous:
                raise ValidationError(f"context sets endogenous variable {k}")
        for n in self.exogenous:
            if n not in ctx:
                raise ValidationError(f"context is missing exogenous variable {n}")
            if ctx[n] not in self._index[n].domain:
                raise ValidationError(f"value {ctx[n]!r} not in domain of {n}")
        return {n: ctx[n] for n in self.exogenous}

    def check_intervention(self, intervention: Mapping[str, object]) -> dict[str, str]:
        out = {}
        for k, v in intervention.items():
            var = self[k]
            if var.exogenous:
                raise ValidationError(f"cannot intervene on exogenous variable {k}")
            v = _tok(v)
            if v not in var.domain:
                raise ValidationError(f"value {v!r} not in domain of {k}")
            out[k] = v
        return out

    def check_formula(self, formula: Formula) -> Formula:
        for a in formula.atoms():
            var = self[a.var]
            if a.value not in var.domain:
                raise ValidationError(f"value {a.value!r} not in domain of {a.var}")
        return formula

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_functions(
        cls,
        exogenous: Mapping[str, Sequence[object]],
        endogenous: Sequence[tuple[str, Sequence[object], Sequence[str], Callable[..., object]]],
    ) -> "CausalModel":
        """Build a model from Python callables, tabulating each one.

        ``endogenous`` items are ``(name, domain, parents, fn)`` where ``fn``
        receives the parent values (as tokens) positionally.
        """
        variables = [Variable(n, tuple(_tok(v) for v in dom), True) for n, dom in exogenous.items()]
        variables += [Variable(n, tuple(_tok(v) for v in dom)) for n, dom, _, _ in endogenous]
        doms = {v.name: v.domain for v in variables}
        equations = {}
        for name, _, parents, fn in endogenous:
            for p in parents:
                if p not in doms:
                    raise ValidationError(f"undeclared parent {p} in equation for {name}")
            table = {
                row: _tok(fn(*row)) for row in itertools.product(*(doms[p] for p in parents))
            }
            equations[name] = Equation(name, tuple(parents), table)
        return cls(variables, equations)


# ---------------------------------------------------------------------------
# semantics


def evaluate(model: CausalModel, context: Mapping[str, object]) -> dict[str, str]:
    """Unique solution of the model in ``context``, in declaration order."""
    values: dict[str, str] = dict(model.check_context(context))
    for n in model.topological_order:
        values[n] = model.equations[n](values)
    return {n: values[n] for n in model.names}


def intervene(model: CausalModel, intervention: Mapping[str, object]) -> CausalModel:
    """Return a copy of ``model`` with the intervened equations replaced by constants."""
    fixed = model.check_intervention(intervention)
    if not fixed:
        return model
    equations = dict(model.equations)
    for k, v in fixed.items():
        equations[k] = Equation.constant(k, v)
    return CausalModel(model.variables, equations)


def satisfies(
    model: CausalModel,
    context: Mapping[str, object],
    intervention: Mapping[str, object],
    formula: Formula | str,
) -> bool:
    """Decide ``(M, u) |= [X <- x] formula``."""
    if isinstance(formula, str):
        formula = parse_formula(formula)
    model.check_formula(formula)
    return formula.holds(evaluate(intervene(model, intervention), context))


# ---------------------------------------------------------------------------
# model DSL

_MODEL_TOKENS = [
    # OP first so "->" is not read as a value starting with "-"
    ("OP", r"->|==|!=|[{}(),:;=&|!]"),
    ("NAME", r"[A-Za-z_][A-Za-z0-9_.@]*"),
    ("VALUE", r"[0-9+\-][A-Za-z0-9_.@+\-]*"),
    ("STRING", r"'[^'\n]*'|\"[^\"\n]*\""),
]


@dataclass
class _Decl:
    name: str
    domain: tuple[str, ...]
    exogenous: bool
    tok: Token
    expr: object = None  # expression AST or ("table", rows)


def parse_model(text: str) -> CausalModel:
    """Parse the line-oriented model language.

    ::

        exo U : {0,1}
        var C = U
        var D = A | B
        var H : {low,high} = { (C=0) -> low; (C=1) -> high; }
    """
    cur = Cursor(tokenize(text, _MODEL_TOKENS))
    decls: list[_Decl] = []
    while not cur.at("EOF"):
        kw = cur.expect("NAME", what="'exo' or 'var'")
        if kw.text not in RESERVED:
            raise ParseError(f"expected 'exo' or 'var', got {kw.text!r}", kw.line, kw.col)
        name_tok = cur.expect("NAME", what="variable name")
        if name_tok.text in RESERVED:
            raise cur.error(f"{name_tok.text!r} is a reserved word", name_tok)
        domain = BOOL_DOMAIN
        if cur.accept("OP", ":"):
            domain = _parse_domain(cur)
        decl = _Decl(name_tok.text, domain, kw.text == "exo", name_tok)
        if kw.text == "var":
            cur.expect("OP", "=")
            if cur.at("OP", "{"):
                decl.expr = _parse_table(cur)
            else:
                decl.expr = _parse_expr(cur)
        cur.accept("OP", ";")
        decls.append(decl)

    seen: dict[str, _Decl] = {}
    for d in decls:
        if d.name in seen:
            raise ParseError(f"duplicate variable {d.name}", d.tok.line, d.tok.col)
        seen[d.name] = d
    variables = []
    for d in decls:
        try:
            variables.append(Variable(d.name, d.domain, d.exogenous))
        except ValidationError as e:
            raise ParseError(str(e), d.tok.line, d.tok.col) from None
    doms = {v.name: v.domain for v in variables}
    equations = {}
    for d in decls:
        if d.exogenous:
            continue
        try:
            equations[d.name] = _compile_decl(d, doms)
        except ValidationError as e:
            raise ParseError(str(e), d.tok.line, d.tok.col) from None
    try:
        return CausalModel(variables, equations)
    except ValidationError as e:
        raise ParseError(str(e)) from None


def _parse_domain(cur: Cursor) -> tuple[str, ...]:
    cur.expect("OP", "{")
    values = [_parse_value_token(cur)]
    while cur.accept("OP", ","):
        values.append(_parse_value_token(cur))
    cur.expect("OP", "}")
    return tuple(values)


def _parse_table(cur: Cursor) -> tuple:
    cur.expect("OP", "{")
    rows = []
    while not cur.accept("OP", "}"):
        start = cur.expect("OP", "(")
        conds: list[tuple[str, str]] = []
        if not cur.at("OP", ")"):
            while True:
                p = cur.expect("NAME", what="parent name").text
                cur.expect("OP", "=")
                conds.append((p, _parse_value_token(cur)))
                if not cur.accept("OP", ","):
                    break
        cur.expect("OP", ")")
        cur.expect("OP", "->")
        out = _parse_value_token(cur)
        cur.accept("OP", ";")
        rows.append((conds, out, start))
    return ("table", rows)


# expression AST: ("var", name) ("lit", value) ("not", e) ("and", a, b) ("or", a, b)
# ("eq", a, b) ("ne", a, b)


def _parse_expr(cur: Cursor) -> tuple:
    left = _parse_conj(cur)
    while cur.accept("OP", "|"):
        left = ("or", left, _parse_conj(cur))
    return left


def _parse_conj(cur: Cursor) -> tuple:
    left = _parse_cmp(cur)
    while cur.accept("OP", "&"):
        left = ("and", left, _parse_cmp(cur))
    return left


def _parse_cmp(cur: Cursor) -> tuple:
    left = _parse_prim(cur)
    tok = cur.peek()
    if tok.kind == "OP" and tok.text in ("==", "!="):
        cur.next()
        right = _parse_prim(cur)
        return ("eq" if tok.text == "==" else "ne", left, right)
    return left


def _parse_prim(cur: Cursor) -> tuple:
    if cur.accept("OP", "!"):
        return ("not", _parse_prim(cur))
    if cur.accept("OP", "("):
        e = _parse_expr(cur)
        cur.expect("OP", ")")
        return e
    tok = cur.next()
    if tok.kind == "NAME":
        return ("var", tok.text, tok)
    if tok.kind == "VALUE":
        return ("lit", tok.text)
    if tok.kind == "STRING":
        return ("lit", tok.text[1:-1])
    raise ParseError(f"expected an expression, got {tok.text or 'end of input'!r}", tok.line, tok.col)


def _resolve(expr: tuple, doms: Mapping[str, tuple[str, ...]], parents: dict[str, None]) -> tuple:
    """Bind names: variables become parents, a bare name compared with a variable
    that is not itself a variable is read as a value literal."""
    kind = expr[0]
    if kind == "var":
        if expr[1] not in doms:
            raise ValidationError(f"undeclared parent {expr[1]}")
        parents.setdefault(expr[1], None)
        return ("var", expr[1])
    if kind == "lit":
        return expr
    if kind in ("eq", "ne"):
        a, b = expr[1], expr[2]
        if a[0] == "var" and b[0] == "var":
            if b[1] not in doms and a[1] in doms and b[1] in doms[a[1]]:
                b = ("lit", b[1])
            elif a[1] not in doms and b[1] in doms and a[1] in doms[b[1]]:
                a = ("lit", a[1])
        return (kind, _resolve(a, doms, parents), _resolve(b, doms, parents))
    return (kind,) + tuple(_resolve(e, doms, parents) for e in expr[1:])


def _truth(v: str) -> bool:
    if v == "1":
        return True
    if v == "0":
        return False
    raise ValidationError(f"non-boolean operand {v!r} in boolean expression")


def _eval_expr(expr: tuple, env: Mapping[str, str]) -> str:
    kind = expr[0]
    if kind == "var":
        return env[expr[1]]
    if kind == "lit":
        return expr[1]
    if kind == "not":
        return "0" if _truth(_eval_expr(expr[1], env)) else "1"
    if kind == "and":
        ok = _truth(_eval_expr(expr[1], env)) & _truth(_eval_expr(expr[2], env))
        return "1" if ok else "0"
    if kind == "or":
        ok = _truth(_eval_expr(expr[1], env)) | _truth(_eval_expr(expr[2], env))
        return "1" if ok else "0"
    same = _eval_expr(expr[1], env) == _eval_expr(expr[2], env)
    return "1" if same == (kind == "eq") else "0"


def _compile_decl(d: _Decl, doms: Mapping[str, tuple[str, ...]]) -> Equation:
    expr = d.expr
    assert isinstance(expr, tuple)
    if expr[0] == "table":
        rows = expr[1]
        if not rows:
            raise ValidationError(f"empty table for {d.name}")
        parents = tuple(p for p, _ in rows[0][0])
        table: dict[tuple[str, ...], str] = {}
        for conds, out, tok in rows:
            names = tuple(p for p, _ in conds)
            if sorted(names) != sorted(parents) or len(set(names)) != len(names):
                raise ParseError(
                    f"table row for {d.name} must name exactly the parents {', '.join(parents) or '()'}",
                    tok.line,
                    tok.col,
                )
            for p in names:
                if p not in doms:
                    raise ParseError(f"undeclared parent {p} in equation for {d.name}", tok.line, tok.col)
            vals = dict(conds)
            key = tuple(vals[p] for p in parents)
            for p, v in zip(parents, key):
                if v not in doms[p]:
                    raise ParseError(f"value {v!r} not in domain of {p}", tok.line, tok.col)
            if key in table:
                raise ParseError(f"duplicate table row for {d.name}", tok.line, tok.col)
            table[key] = out
        return Equation(d.name, parents, table)

    found: dict[str, None] = {}
    bound = _resolve(expr, doms, found)
    parents = tuple(found)
    table = {}
    for row in itertools.product(*(doms[p] for p in parents)):
        table[row] = _eval_expr(bound, dict(zip(parents, row)))
    return Equation(d.name, parents, table)


def format_model(model: CausalModel) -> str:
    """Pretty-print ``model`` in the model language, every equation as a table."""
    lines = []
    for var in model.variables:
        dom = "{" + ",".join(var.domain) + "}"
        if var.exogenous:
            lines.append(f"exo {var.name} : {dom}")
            continue
        eq = model.equations[var.name]
        lines.append(f"var {var.name} : {dom} = {{")
        for row in itertools.product(*(model.domain(p) for p in eq.parents)):
            cond = ", ".join(f"{p}={v}" for p, v in zip(eq.parents, row))
            lines.append(f"  ({cond}) -> {eq.table[row]};")
        lines.append("}")
    return "\n".join(lines) + ("\n" if lines else "")

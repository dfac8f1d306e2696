"""Command-line interface.

Exit codes: 0 success / true verdict, 1 usage, parse or I/O error, 2 tampered
log, 3 anomalies found with ``--fail-on-anomaly``, 4 negative verdict.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import actual_cause, scm
from .diagram import build_diagram, detect_anomalies, export_dot, match_laws
from .errors import CauselogError, ParseError
from .explain import explain, root_causes, to_scm
from .log import parse_log, scan_chain
from .rules import RuleSet, merge_rules, parse_rules

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TAMPERED = 2
EXIT_ANOMALIES = 3
EXIT_FALSE = 4

MAX_SIZE_ENV = "CAUSELOG_MAX_CAUSE_SIZE"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors, which would read as "tampered"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_rules(paths: Sequence[str] | None) -> RuleSet:
    sets = []
    for p in paths or ():
        try:
            sets.append(parse_rules(_read(p)))
        except ParseError as e:
            raise ParseError(f"{p}: {e}") from None
    return merge_rules(sets)


def _load_log(path: str):
    try:
        return parse_log(_read(path))
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from None


def _assignments(items: Sequence[str] | None) -> dict[str, str]:
    """``["A=0,B=1", "C=1"]`` -> ``{"A": "0", "B": "1", "C": "1"}``."""
    out: dict[str, str] = {}
    for item in items or ():
        for part in item.split(","):
            part = part.strip()
            if not part:
                continue
            name, sep, value = part.partition("=")
            if not sep or not name.strip() or not value.strip():
                raise ParseError(f"expected NAME=VALUE, got {part!r}")
            out[name.strip()] = value.strip()
    return out


def _max_size(arg: int | None) -> int:
    if arg is not None:
        value = arg
    else:
        raw = os.environ.get(MAX_SIZE_ENV)
        if raw is None:
            return actual_cause.DEFAULT_MAX_SIZE
        try:
            value = int(raw)
        except ValueError:
            raise ParseError(f"{MAX_SIZE_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ParseError("max cause size must be a positive integer")
    return value


def _dump(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


# -- subcommands -----------------------------------------------------------


def cmd_verify(args) -> int:
    with open(args.log, "rb") as fh:
        report = scan_chain(fh.read())
    print(report)
    return EXIT_OK if report.ok else EXIT_TAMPERED


def cmd_diagram(args) -> int:
    log = _load_log(args.log)
    rules = _load_rules(args.rules)
    matches = match_laws(log, rules)
    diagram = build_diagram(log, rules, matches)
    anomalies = detect_anomalies(log, rules, diagram, matches)
    if args.format == "scm":
        model, context = to_scm(diagram, anomalies)
        sys.stdout.write(scm.format_model(model))
        ctx = " ".join(f"{k}={v}" for k, v in context.items())
        sys.stdout.write(f"# context: {ctx}\n")
    else:
        sys.stdout.write(export_dot(diagram, anomalies))
    return EXIT_OK


def cmd_anomalies(args) -> int:
    log = _load_log(args.log)
    rules = _load_rules(args.rules)
    found = detect_anomalies(log, rules)
    _dump([a.to_dict() for a in found])
    return EXIT_ANOMALIES if found and args.fail_on_anomaly else EXIT_OK


def cmd_counterfactual(args) -> int:
    model = scm.parse_model(_read(args.model))
    verdict = scm.satisfies(model, _assignments(args.context), _assignments(args.set), args.query)
    print("true" if verdict else "false")
    return EXIT_OK if verdict else EXIT_FALSE


def _model_and_query(args):
    """Explicit model file, or the model lifted from ``--log``/``--rules``."""
    if args.model:
        if args.log:
            raise ParseError("give either a model file or --log, not both")
        if not args.query:
            raise ParseError("--query is required with a model file")
        model = scm.parse_model(_read(args.model))
        return model, _assignments(args.context), args.query
    if not args.log or args.target is None:
        raise ParseError("give a model file, or --log with --target")
    log = _load_log(args.log)
    rules = _load_rules(args.rules)
    matches = match_laws(log, rules)
    diagram = build_diagram(log, rules, matches)
    if not 0 <= args.target < len(diagram.nodes):
        raise ParseError(f"unknown target seq {args.target}")
    model, context = to_scm(diagram, detect_anomalies(log, rules, diagram, matches))
    query = args.query or f"{diagram.nodes[args.target].label}=1"
    return model, context, query


def cmd_actual_cause(args) -> int:
    model, context, query = _model_and_query(args)
    search = actual_cause.CauseSearch(model, context, query)
    if args.candidate:
        verdict = search.verdict(_assignments(args.candidate))
        _dump(verdict.to_dict())
        return EXIT_OK if verdict.is_cause else EXIT_FALSE
    causes = search.find(_max_size(args.max_size))
    _dump([c.to_dict() for c in causes])
    return EXIT_OK if causes else EXIT_FALSE


def cmd_causes(args) -> int:
    log = _load_log(args.log)
    rules = _load_rules(args.rules)
    diagram = build_diagram(log, rules)
    sets = root_causes(diagram, args.target)
    _dump({"target": args.target, "root_causes": [list(s) for s in sets]})
    return EXIT_OK


def cmd_explain(args) -> int:
    log = _load_log(args.log)
    rules = _load_rules(args.rules)
    report = explain(log, rules, args.target, _max_size(args.max_size))
    sys.stdout.write(report.to_json() if args.format == "json" else report.to_text())
    return EXIT_OK


# -- wiring ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="causelog", description="Causal analysis of tamper-evident event logs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def rules_opt(p):
        p.add_argument("--rules", action="append", metavar="FILE",
                       help="rule file; repeat to merge several in order")

    p = sub.add_parser("verify", help="check a chained log for tampering")
    p.add_argument("log", help="JSON-lines log file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("diagram", help="build the causal diagram of a log")
    p.add_argument("log", help="JSON-lines log file")
    rules_opt(p)
    p.add_argument("--dot", dest="format", action="store_const", const="dot",
                   help="emit Graphviz DOT (the default)")
    p.add_argument("--format", choices=("dot", "scm"), default="dot",
                   help="dot, or scm for the lifted causal model")
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("anomalies", help="list mismatches between log and rules as JSON")
    p.add_argument("log", help="JSON-lines log file")
    rules_opt(p)
    p.add_argument("--fail-on-anomaly", action="store_true",
                   help="exit 3 when any anomaly is found")
    p.set_defaults(func=cmd_anomalies)

    p = sub.add_parser("counterfactual", help="decide (M,u) |= [X<-x] phi")
    p.add_argument("model", help="model file")
    p.add_argument("--context", action="append", metavar="U=v", help="exogenous values")
    p.add_argument("--set", action="append", metavar="X=v", help="intervention, e.g. A=0,B=0")
    p.add_argument("--query", required=True, metavar="FORMULA", help='formula such as "D=1"')
    p.set_defaults(func=cmd_counterfactual)

    p = sub.add_parser("actual-cause", help="check a candidate cause, or list all minimal causes")
    p.add_argument("model", nargs="?", help="model file (or use --log/--rules/--target)")
    p.add_argument("--context", action="append", metavar="U=v", help="exogenous values")
    p.add_argument("--candidate", action="append", metavar="X=v",
                   help="candidate cause, e.g. A=1,B=1; omit to enumerate causes")
    p.add_argument("--query", metavar="FORMULA", help="effect formula")
    p.add_argument("--log", help="lift the model from this log instead of a model file")
    rules_opt(p)
    p.add_argument("--target", type=int, help="seq of the fact to explain (with --log)")
    p.add_argument("--max-size", type=int, help=f"largest cause to enumerate (env {MAX_SIZE_ENV}, default 3)")
    p.set_defaults(func=cmd_actual_cause)

    p = sub.add_parser("causes", help="trace root causes of one fact")
    p.add_argument("log", help="JSON-lines log file")
    rules_opt(p)
    p.add_argument("--target", type=int, required=True, help="seq of the fact to explain")
    p.set_defaults(func=cmd_causes)

    p = sub.add_parser("explain", help="full report: root causes, anomalies, actual causes, suspects")
    p.add_argument("log", help="JSON-lines log file")
    rules_opt(p)
    p.add_argument("--target", type=int, required=True, help="seq of the fact to explain")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--max-size", type=int, help=f"largest cause to enumerate (env {MAX_SIZE_ENV}, default 3)")
    p.set_defaults(func=cmd_explain)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CauselogError, OSError) as e:
        print(f"causelog {args.command}: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success, 1 negative verdict, 2 unknown, 64 usage error,
65 data error. Every payload argument accepts ``-`` for stdin; tree and
derivation payloads may also be inline JSON or a path to a JSON file.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import formula as fm
from .calculus import RC, DerivationError, check, derivation_from_json, system_from_name
from .embed import to_formula, to_tree
from .normalize import NormalizationObstruction, normalize, theorem_bounds
from .prover import DEFAULT_BUDGET, Proved, Refuted, SearchBudget, models, prove
from .rules import NotApplicable, apply, format_rule, rule_from_json, rule_to_json
from .calculus import derivation_to_json
from .tree import from_json as tree_from_json, height, node_count, to_json as tree_to_json, width

OK, NEGATIVE, UNKNOWN, USAGE, DATA = 0, 1, 2, 64, 65


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def _read(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    return arg


def _load_json(arg: str):
    text = sys.stdin.read() if arg == "-" else arg
    if arg != "-" and not text.lstrip().startswith(("{", "[", '"')) and os.path.isfile(arg):
        with open(arg) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DataError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None


def _formula(arg: str) -> fm.Formula:
    text = _read(arg).strip()
    if text.startswith(("{", "[", '"')):
        return fm.from_json(_load_json(text))
    try:
        return fm.parse(text)
    except fm.FormulaSyntaxError as e:
        raise DataError(f"{e}\n  {text}\n  {' ' * e.pos}^") from None


def _tree(arg: str):
    try:
        return tree_from_json(_load_json(arg))
    except ValueError as e:
        raise DataError(str(e)) from None


def _derivation(arg: str):
    try:
        return derivation_from_json(_load_json(arg))
    except (ValueError, KeyError, TypeError) as e:
        raise DataError(f"bad derivation: {e}") from None


def _system(name: str):
    try:
        return system_from_name(name)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _emit(args, payload, text: str | None = None) -> None:
    if args.format == "text" and text is not None:
        print(text)
    else:
        print(json.dumps(payload, sort_keys=True))


def cmd_parse(args) -> int:
    f = _formula(args.formula)
    _emit(args, fm.to_json(f), fm.to_text(f))
    return OK


def cmd_embed(args) -> int:
    if args.direction == "to-tree":
        t = to_tree(_formula(args.input))
        _emit(args, tree_to_json(t), repr(t))
    else:
        f = to_formula(_tree(args.input))
        _emit(args, fm.to_json(f), fm.to_text(f))
    return OK


def cmd_metrics(args) -> int:
    t = _tree(args.tree)
    out = {"width": width(t), "height": height(t), "nodes": node_count(t)}
    _emit(args, out, " ".join(f"{k}={v}" for k, v in out.items()))
    return OK


def cmd_apply(args) -> int:
    t = _tree(args.tree)
    text = _read(args.rule).strip()
    try:
        r = rule_from_json(json.loads(text)) if text.startswith("{") else rule_from_json(text)
        s = apply(t, r)
    except NotApplicable as e:
        print(str(e), file=sys.stderr)
        return NEGATIVE
    except ValueError as e:
        raise DataError(str(e)) from None
    _emit(args, tree_to_json(s), repr(s))
    return OK


def cmd_check(args) -> int:
    d = _derivation(args.derivation)
    try:
        end, trace = check(d, args.sys, trace=True)
    except DerivationError as e:
        _emit(args, {"valid": False, "step": e.step, "error": str(e)}, f"invalid: {e}")
        return NEGATIVE
    payload = {"valid": True, "end": tree_to_json(end)}
    lines = [repr(end)]
    if args.trace:
        payload["trace"] = [tree_to_json(t) for t in trace]
        lines = [repr(d.start)] + [f"  {format_rule(r)} -> {t!r}" for r, t in zip(d.steps, trace[1:])]
    _emit(args, payload, "\n".join(lines))
    return OK


def cmd_normalize(args) -> int:
    d = _derivation(args.derivation)
    try:
        shape = normalize(d, args.sys)
    except DerivationError as e:
        _emit(args, {"error": str(e)}, f"invalid derivation: {e}")
        return NEGATIVE
    except NormalizationObstruction as e:
        _emit(args, {"error": str(e), "obstruction": True}, f"no normal form: {e}")
        return NEGATIVE
    report = theorem_bounds(d, args.sys, shape)
    payload = {"normal": shape.to_json(), "steps": [rule_to_json(r) for r in shape.steps],
               "bounds": report.to_json()}
    text = "\n".join([" ".join(map(format_rule, shape.steps)) or "(no steps)", report.table()])
    _emit(args, payload, text)
    if args.verify_bounds and not report.ok:
        return NEGATIVE
    return OK


def cmd_prove(args) -> int:
    phi, psi = _formula(args.phi), _formula(args.psi)
    budget = SearchBudget(args.budget, args.max_nodes, args.max_states)
    result = prove(phi, psi, args.sys, budget)
    if isinstance(result, Proved):
        d = result.derivation
        _emit(args, {"verdict": "proved", "derivation": derivation_to_json(d)},
              "proved: " + (" ".join(map(format_rule, d.steps)) or "(no steps)"))
        return OK
    if isinstance(result, Refuted):
        _emit(args, {"verdict": "refuted", "reason": result.reason}, f"refuted: {result.reason}")
        return NEGATIVE
    _emit(args, {"verdict": "unknown", "diagnostics": result.diagnostics},
          f"unknown: {result.diagnostics}")
    return UNKNOWN


def cmd_oracle(args) -> int:
    phi, psi = _formula(args.phi), _formula(args.psi)
    holds = models(to_tree(phi), psi)
    _emit(args, {"entails": holds}, "true" if holds else "false")
    return OK if holds else NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS,
                        help="output format (default json)")
    system = argparse.ArgumentParser(add_help=False)
    system.add_argument("--sys", type=_system, default=RC, metavar="NAME",
                        help="k, k4, rc, or k joined with extensions such as k+m+j (default rc)")

    parser = _Parser(prog="sptree", description="Modal trees and their rewriting calculi.")
    parser.add_argument("--format", choices=("json", "text"), default="json", help="output format")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("parse", parents=[common], help="parse a formula")
    p.add_argument("formula", help="formula text, or - for stdin")
    p.set_defaults(run=cmd_parse)

    p = sub.add_parser("embed", parents=[common], help="translate between formulas and trees")
    p.add_argument("direction", choices=("to-tree", "to-formula"))
    p.add_argument("input", help="formula text (to-tree) or tree JSON (to-formula)")
    p.set_defaults(run=cmd_embed)

    p = sub.add_parser("metrics", parents=[common], help="width, height and node count of a tree")
    p.add_argument("tree", help="tree JSON, a file, or -")
    p.set_defaults(run=cmd_metrics)

    p = sub.add_parser("apply", parents=[common], help="apply one rule to a tree")
    p.add_argument("tree", help="tree JSON, a file, or -")
    p.add_argument("rule", help="rule text such as 'J@e(i=1,j=2)' or rule JSON")
    p.set_defaults(run=cmd_apply)

    p = sub.add_parser("check", parents=[common, system], help="replay a derivation")
    p.add_argument("derivation", help="derivation JSON, a file, or -")
    p.add_argument("--trace", action="store_true", help="include every intermediate tree")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("normalize", parents=[common, system], help="reorder a derivation into normal form")
    p.add_argument("derivation", help="derivation JSON, a file, or -")
    p.add_argument("--verify-bounds", action="store_true", help="exit 1 if a block exceeds its bound")
    p.set_defaults(run=cmd_normalize)

    p = sub.add_parser("prove", parents=[common, system], help="search for a derivation of phi |- psi")
    p.add_argument("phi")
    p.add_argument("psi")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET.max_steps, help="maximum number of steps")
    p.add_argument("--max-nodes", type=int, default=DEFAULT_BUDGET.max_nodes)
    p.add_argument("--max-states", type=int, default=DEFAULT_BUDGET.max_states)
    p.set_defaults(run=cmd_prove)

    p = sub.add_parser("oracle", parents=[common], help="decide phi |- psi in K+ by model checking")
    p.add_argument("phi")
    p.add_argument("psi")
    p.set_defaults(run=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except DataError as e:
        print(f"error: {e}", file=sys.stderr)
        return DATA
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return DATA


if __name__ == "__main__":
    sys.exit(main())

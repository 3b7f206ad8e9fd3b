"""``wirec``: check programs, export LTSs, decide bisimilarity, run the law suite.

Exit codes: 0 success, 1 parse/sort/usage error, 2 budget exceeded,
3 sort mismatch, 10 a negative answer (not bisimilar, or a law failed).
"""

from __future__ import annotations

import argparse
import os
import sys

from . import equivalence, lts, stdlib
from .parser import Program, parse_program
from .sorting import check_definitions
from .sos import DEFAULT_BUDGET, BudgetExceeded, format_label
from .syntax import WireError, pretty, star

EXIT_OK, EXIT_ERROR, EXIT_BUDGET, EXIT_SORT_MISMATCH, EXIT_NEGATIVE = 0, 1, 2, 3, 10


class CliError(WireError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors, which would read as "budget exceeded"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _budget(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("budget must be at least 1")
    return n


def _default_budget() -> int:
    env = os.environ.get("WIREC_BUDGET")
    if env is None:
        return DEFAULT_BUDGET
    try:
        return _budget(env)
    except argparse.ArgumentTypeError as err:
        raise CliError(f"WIREC_BUDGET: {err}") from None


def _load(path: str, mode: str | None) -> Program:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise CliError(f"cannot read {path}: {err.strerror}") from None
    forced = None if mode is None else mode == "directed"
    return check_definitions(parse_program(text, forced))


def _named(program: Program, name: str):
    """A definition of the program, else a library constant such as ``d``."""
    if name in program.definitions:
        return program.definitions[name][0]
    term = stdlib.lookup_builtin(name, program.alphabet, program.directed)
    if term is None:
        raise CliError(f"no definition or library constant named {name!r}")
    return term


def cmd_check(args, out) -> int:
    program = _load(args.file, args.mode)
    for name, (_, sort) in program.definitions.items():
        print(f"{name} : {sort}", file=out)
    return EXIT_OK


def _lts_text(graph: lts.Lts) -> str:
    lines = [f"sort {graph.sort}", f"states {len(graph.states)}", f"complete {str(graph.complete).lower()}"]
    for i, st in enumerate(graph.states):
        mark = " (initial)" if i == graph.initial else ""
        lines.append(f"state {i}{mark}: {st.key}")
    for src, lab, dst in graph.sorted_transitions():
        lines.append(f"{src} --{format_label(lab)}--> {dst}")
    return "\n".join(lines) + "\n"


def cmd_lts(args, out) -> int:
    program = _load(args.file, args.mode)
    term = _named(program, args.term)
    graph = lts.explore(term, args.budget, program.alphabet, program.directed)
    match args.format:
        case "dot":
            out.write(lts.export_dot(graph))
        case "json":
            out.write(lts.export_json(graph))
        case _:
            out.write(_lts_text(graph))
    for w in graph.warnings:
        print(f"warning: {w}; partial graph written", file=sys.stderr)
    return EXIT_OK if graph.complete else EXIT_BUDGET


def cmd_bisim(args, out) -> int:
    program = _load(args.file, args.mode)
    left, right = _named(program, args.left), _named(program, args.right)
    try:
        verdict = equivalence.bisimilar(left, right, args.budget, program.alphabet, program.directed)
    except equivalence.SortMismatch as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SORT_MISMATCH
    out.write(verdict.to_json() if args.format == "json" else verdict.to_text())
    return EXIT_OK if verdict.bisimilar else EXIT_NEGATIVE


def cmd_laws(args, out) -> int:
    report = stdlib.law_suite(n_max=args.n_max, budget=args.budget, seed=args.seed)
    out.write(report.to_json() if args.format == "json" else report.to_text())
    if any(r.verdict == stdlib.FAIL for r in report.results):
        return EXIT_NEGATIVE
    if not report.passed:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_star(args, out) -> int:
    from .sorting import infer

    program = _load(args.file, args.mode)
    rotated = star(_named(program, args.term))
    print(f"{pretty(rotated)} : {infer(rotated, directed=program.directed)}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--mode", choices=("undirected", "directed"),
                        help="override the program's mode declaration")

    budget = _Parser(add_help=False)
    budget.add_argument("--budget", type=_budget, default=None,
                        help=f"maximum states per exploration (default $WIREC_BUDGET or {DEFAULT_BUDGET})")

    ap = _Parser(prog="wirec", description="Wire calculus interpreter and equivalence checker.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="sort-check a program and list its definitions")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("lts", parents=[common, budget], help="explore a definition and print its LTS")
    p.add_argument("file")
    p.add_argument("--term", required=True)
    p.add_argument("--format", choices=("dot", "json", "text"), default="text")
    p.set_defaults(func=cmd_lts)

    p = sub.add_parser("bisim", parents=[common, budget], help="decide bisimilarity of two definitions")
    p.add_argument("file")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("laws", parents=[budget], help="run the seeded law suite")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_laws)

    p = sub.add_parser("star", parents=[common], help="print the rotated term and its sort")
    p.add_argument("file")
    p.add_argument("term")
    p.set_defaults(func=cmd_star)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "budget", 0) is None:
            args.budget = _default_budget()
        if getattr(args, "n_max", 0) < 0:
            raise CliError("--n-max must be non-negative")
        return args.func(args, out)
    except BudgetExceeded as err:
        print(f"error: {err}; no answer", file=sys.stderr)
        return EXIT_BUDGET
    except WireError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

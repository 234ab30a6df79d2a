"""``treeregex`` command line: build, run, stats, compare, gen.

Exit codes: 0 ok, 1 a checked claim failed, 2 bad user input, 3 internal
invariant violation (including the derived-term watchdog).
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Callable

from .automaton import TreeAutomaton, run, to_dot, to_json
from .construct import (
    InvariantViolation,
    WatchdogError,
    equation_automaton,
    follow_automaton,
    k_c_continuation_automaton,
    k_position_automaton,
)
from .generate import EXAMPLE_ALPHABET, GeneratorConfig, generate_many, shrink
from .relations import rel_combined, rel_e, rel_follow, v_merge
from .terms import (
    ParseError,
    RankedAlphabet,
    RegExpr,
    Zero,
    all_trees,
    parse_alphabet,
    parse_expr,
    parse_tree,
    to_text,
)
from .verify import build_all, verify_expression

EXIT_OK, EXIT_CLAIM, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(Exception):
    pass


def _vmerge(e, alphabet, reading="expression"):
    return v_merge(e, alphabet, reading).automaton


BUILDERS: dict[str, Callable[..., TreeAutomaton]] = {
    "kpos": k_position_automaton,
    "follow": follow_automaton,
    "equation": equation_automaton,
    "kcc": k_c_continuation_automaton,
    "vmerge": _vmerge,
}


def _read(value: str | None, path: str | None, what: str) -> str | None:
    if value is not None and path is not None:
        raise InputError(f"give --{what} or --{what}-file, not both")
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                return fh.read().strip()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
    return value


def _alphabet(args) -> RankedAlphabet:
    text = _read(args.alphabet, args.alphabet_file, "alphabet")
    return EXAMPLE_ALPHABET if text is None else parse_alphabet(text)


def _expr(args, alphabet: RankedAlphabet) -> RegExpr:
    text = _read(args.expr, args.expr_file, "expr")
    if text is None:
        raise InputError("an expression is required (--expr or --expr-file)")
    return parse_expr(text, alphabet)


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _build(args, e: RegExpr, alphabet: RankedAlphabet) -> TreeAutomaton:
    if args.construction == "vmerge":
        return _vmerge(e, alphabet, args.reading)
    return BUILDERS[args.construction](e, alphabet)


def cmd_build(args) -> int:
    alphabet = _alphabet(args)
    e = _expr(args, alphabet)
    if isinstance(e, Zero):
        print("warning: the expression 0 denotes the empty language; the automaton has no states", file=sys.stderr)
    a = _build(args, e, alphabet)
    _emit(to_json(a) if args.format == "json" else to_dot(a, args.construction), args.out)
    print(f"{args.construction}: {a.summary()}", file=sys.stderr)
    return EXIT_OK


def cmd_run(args) -> int:
    alphabet = _alphabet(args)
    e = _expr(args, alphabet)
    t = parse_tree(args.tree, alphabet)
    a = _build(args, e, alphabet)
    reached = run(a, t)
    verdict = "accept" if reached & a.finals else "reject"
    lines = [f"states: {{{', '.join(a.labels[q] for q in sorted(reached))}}}", verdict]
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_stats(args) -> int:
    alphabet = _alphabet(args)
    e = _expr(args, alphabet)
    built = build_all(e, alphabet)
    rows = [(name, a.n_states, a.n_transitions) for name, a in built.as_dict().items()]
    lines = [f"{'construction':<14}{'states':>8}{'transitions':>13}"]
    lines += [f"{name:<14}{q:>8}{d:>13}" for name, q, d in rows]
    if not isinstance(e, Zero):
        c = built.kcc
        ebar = c.keys[0].continuation
        lines.append("")
        lines.append(f"{'relation':<14}{'blocks':>8}")
        lines.append(f"{'follow (kpos)':<14}{len(rel_follow(built.kpos, ebar)):>8}")
        lines.append(f"{'unmarked (kcc)':<14}{len(rel_e(c)):>8}")
        lines.append(f"{'combined (kcc)':<14}{len(rel_combined(c)):>8}")
        lines.append(f"{'vmerge (kcc)':<14}{len(built.extras['vmerge_partition']):>8}")
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    alphabet = _alphabet(args)
    trees = all_trees(alphabet, args.depth)
    given = _read(args.expr, args.expr_file, "expr")
    if given is not None:
        exprs = [parse_expr(given, alphabet)]
    else:
        exprs = generate_many(GeneratorConfig(alphabet=alphabet, seed=args.seed), args.count)
    lines = []
    failures = 0
    for i, e in enumerate(exprs):
        t0 = time.perf_counter()
        claims = verify_expression(e, alphabet, args.depth, trees)
        bad = [c for c in claims if not c.passed]
        if len(exprs) == 1:
            lines.append(f"expression: {to_text(e)}")
            lines += [c.line() for c in claims]
        elif bad:
            lines.append(f"[{i}] {to_text(e)}")
            lines += ["  " + c.line() for c in bad]
        if bad:
            failures += 1
            if len(exprs) > 1:
                names = {c.name for c in bad}
                small = shrink(
                    e,
                    lambda x: any(
                        not c.passed and c.name in names for c in verify_expression(x, alphabet, args.depth, trees)
                    ),
                    alphabet.constants,
                )
                lines.append(f"  shrunk counterexample: {to_text(small)}")
        if args.verbose:
            lines.append(f"  [{i}] {time.perf_counter() - t0:.2f}s")
    lines.append(f"{len(exprs) - failures}/{len(exprs)} expressions passed every claim")
    _emit("\n".join(lines), args.out)
    return EXIT_CLAIM if failures else EXIT_OK


def cmd_gen(args) -> int:
    alphabet = _alphabet(args)
    cfg = GeneratorConfig(max_ast_nodes=args.max_nodes, alphabet=alphabet, seed=args.seed)
    _emit("\n".join(to_text(e) for e in generate_many(cfg, args.count)), args.out)
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treeregex", description="Tree automata from regular tree expressions.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, expr=True):
        sp.add_argument("--alphabet", help='ranked alphabet, e.g. "a:0 f:1 g:2" (default: a:0 b:0 c:0 f:1 h:1 g:2)')
        sp.add_argument("--alphabet-file")
        if expr:
            sp.add_argument("--expr", help="regular tree expression")
            sp.add_argument("--expr-file")
        sp.add_argument("--out", help="write output here instead of stdout")

    def construction(sp):
        sp.add_argument("--construction", choices=sorted(BUILDERS), default="kpos")
        sp.add_argument(
            "--reading",
            choices=["expression", "continuation"],
            default="expression",
            help="vmerge only: where Follow is evaluated for the first merge stage",
        )

    b = sub.add_parser("build", help="build one automaton and serialize it")
    common(b)
    construction(b)
    b.add_argument("--format", choices=["json", "dot"], default="json")
    b.set_defaults(func=cmd_build)

    r = sub.add_parser("run", help="run an automaton on a tree")
    common(r)
    construction(r)
    r.add_argument("tree", help='tree literal, e.g. "h(f(b))"')
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("stats", help="state and transition counts of every construction")
    common(s)
    s.set_defaults(func=cmd_stats)

    c = sub.add_parser("compare", help="run the verification battery")
    common(c)
    c.add_argument("--depth", type=int, default=8, help="largest tree size checked (nodes)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--count", type=int, default=200, help="generated expressions when no --expr is given")
    c.add_argument("--verbose", action="store_true")
    c.set_defaults(func=cmd_compare)

    g = sub.add_parser("gen", help="print seeded random expressions")
    common(g, expr=False)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=10)
    g.add_argument("--max-nodes", type=int, default=12)
    g.set_defaults(func=cmd_gen)
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (KeyError, ValueError) as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_INPUT
    except WatchdogError as exc:
        print(f"watchdog: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except InvariantViolation as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

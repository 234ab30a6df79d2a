"""The verification battery run by ``treeregex compare`` and the acceptance suite.

Every claim is checked on one expression and reported as a :class:`Claim`;
nothing here raises on a failed claim, only on malformed input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .automaton import (
    TreeAutomaton,
    is_isomorphism,
    isomorphic,
    quotient,
    run_all,
)
from .construct import (
    EPS,
    equation_automaton,
    f_inverse,
    follow_automaton,
    k_c_continuation_automaton,
    k_position_automaton,
    linear_form,
    positions,
)
from .posfun import first, follow
from .relations import is_maximal_similarity, rel_combined, rel_e, rel_follow, v_merge
from .terms import RankedAlphabet, RegExpr, Tree, Zero, all_trees, enumerate_language, symbols_of

__all__ = ["Claim", "Constructions", "build_all", "language_table", "verify_expression", "CLAIMS"]

CLAIMS = (
    "language",
    "kpos-iso-kcc",
    "kpos/follow-iso-follow",
    "kcc/e-iso-equation",
    "kcc/combined-iso-follow",
    "follow-largest-similarity",
    "first-of-continuation",
    "inverse-nonempty-iff-follow",
    "vmerge-size-bound",
)


@dataclass
class Claim:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}" + (f"  ({self.detail})" if self.detail else "")


@dataclass
class Constructions:
    expr: RegExpr
    kpos: TreeAutomaton
    follow: TreeAutomaton
    equation: TreeAutomaton
    kcc: TreeAutomaton
    vmerge: TreeAutomaton
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict[str, TreeAutomaton]:
        return {
            "kpos": self.kpos,
            "follow": self.follow,
            "equation": self.equation,
            "kcc": self.kcc,
            "vmerge": self.vmerge,
        }


def build_all(e: RegExpr, alphabet: RankedAlphabet | None = None) -> Constructions:
    vm = v_merge(e, alphabet)
    return Constructions(
        e,
        k_position_automaton(e, alphabet),
        follow_automaton(e, alphabet),
        equation_automaton(e, alphabet),
        vm.continuation,
        vm.automaton,
        {"stage1": vm.stage1, "vmerge_partition": vm.partition},
    )


def language_table(
    autos: dict[str, TreeAutomaton], trees: Sequence[Tree]
) -> dict[str, list[bool]]:
    """Acceptance verdict of each automaton on each tree, in ``trees`` order."""
    out = {}
    for name, a in autos.items():
        finals = sum(1 << q for q in a.finals)
        masks = run_all(a, trees)
        out[name] = [bool(masks[t] & finals) for t in trees]
    return out


def _iso(a: TreeAutomaton, b: TreeAutomaton) -> tuple[bool, str]:
    phi = isomorphic(a, b)
    if phi is None:
        return False, f"{a.summary()} vs {b.summary()}"
    return True, a.summary()


def verify_expression(
    e: RegExpr,
    alphabet: RankedAlphabet,
    depth: int = 8,
    trees: Sequence[Tree] | None = None,
    built: Constructions | None = None,
) -> list[Claim]:
    """Run every claim of :data:`CLAIMS` on ``e``.

    ``trees`` (all trees of at most ``depth`` nodes, children first) may be
    passed in to share the enumeration between expressions.
    """
    built = build_all(e, alphabet) if built is None else built
    trees = all_trees(alphabet, depth) if trees is None else trees
    claims = []

    # bounded language agreement against the enumeration oracle
    oracle = enumerate_language(e, depth)
    table = language_table(built.as_dict(), trees)
    expected = [t in oracle for t in trees]
    bad = {name: sum(x != y for x, y in zip(col, expected)) for name, col in table.items()}
    wrong = {k: v for k, v in bad.items() if v}
    claims.append(
        Claim(
            "language",
            not wrong,
            f"{len(trees)} trees, {sum(expected)} in language"
            + (f"; disagreements {wrong}" if wrong else ""),
        )
    )

    P, C = built.kpos, built.kcc
    if isinstance(e, Zero):
        for name in CLAIMS[1:]:
            claims.append(Claim(name, P.n_states == 0 and C.n_states == 0, "empty expression"))
        return claims

    ok, detail = _iso(P, C)
    natural = {i: i for i in range(P.n_states)}
    same_positions = all(C.keys[i].position == P.keys[i] for i in range(P.n_states))
    natural_ok = same_positions and is_isomorphism(P, C, natural)
    claims.append(
        Claim("kpos-iso-kcc", ok and natural_ok, detail + ("" if natural_ok else "; position bijection fails"))
    )

    ebar = linear_form(e)
    sim = rel_follow(P, ebar)
    claims.append(Claim("kpos/follow-iso-follow", *_iso(quotient(P, sim), built.follow)))
    claims.append(Claim("kcc/e-iso-equation", *_iso(quotient(C, rel_e(C)), built.equation)))
    claims.append(Claim("kcc/combined-iso-follow", *_iso(quotient(C, rel_combined(C)), built.follow)))
    claims.append(
        Claim("follow-largest-similarity", is_maximal_similarity(P, sim), f"{len(sim)} blocks")
    )

    arity = symbols_of(ebar)
    mismatched = []
    inverse_bad = []
    for key in C.keys:
        p, cont = key
        if p == EPS:
            continue
        fol = follow(ebar, p.symbol, p.slot)
        if first(cont, check_linear=False) != fol:
            mismatched.append(str(p))
        for g in arity:
            if bool(f_inverse(g, cont)) != (g in fol):
                inverse_bad.append(f"{g} at {p}")
    n_pos = len(positions(ebar)) - 1
    claims.append(
        Claim("first-of-continuation", not mismatched, f"{n_pos} positions" + (f"; bad {mismatched}" if mismatched else ""))
    )
    claims.append(
        Claim("inverse-nonempty-iff-follow", not inverse_bad, "; ".join(inverse_bad[:5]))
    )

    bound = min(built.follow.n_states, built.equation.n_states)
    claims.append(
        Claim(
            "vmerge-size-bound",
            built.vmerge.n_states <= bound,
            f"{built.vmerge.n_states} <= min({built.follow.n_states}, {built.equation.n_states})",
        )
    )
    return claims

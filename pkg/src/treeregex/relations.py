"""State equivalences over the position and continuation automata.

Partitions are always over state indices of a concrete automaton built by
:mod:`treeregex.construct`; the relations read the automaton's ``keys``
(``Position`` or ``ContinuationState``) to decide membership.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .automaton import Partition, TreeAutomaton, is_similarity, quotient
from .construct import (
    EPS,
    ContinuationState,
    Position,
    k_c_continuation_automaton,
)
from .posfun import first, follow
from .terms import RegExpr, Zero, unmark

__all__ = [
    "READINGS",
    "VMerge",
    "rel_follow",
    "rel_e",
    "rel_combined",
    "is_maximal_similarity",
    "v_merge",
    "v_merge_automaton",
]

READINGS = ("expression", "continuation")


def _position(key) -> Position:
    return key.position if isinstance(key, ContinuationState) else key


def _ebar_of(a: TreeAutomaton) -> RegExpr:
    for key in a.keys:
        if isinstance(key, ContinuationState) and key.position == EPS:
            return key.continuation
    raise ValueError("automaton has no (eps^1, expression) state; pass the linear expression")


def rel_follow(a: TreeAutomaton, ebar: RegExpr | None = None) -> Partition:
    """Blocks of states whose positions have equal Follow sets in ``ebar``.

    Works on the position automaton and on the continuation automaton; for
    the latter ``ebar`` defaults to the continuation of the root state.
    """
    ebar = _ebar_of(a) if ebar is None else ebar
    return Partition.by_key(a.n_states, lambda i: _follow_set(ebar, _position(a.keys[i])))


def _follow_set(ebar: RegExpr, p: Position) -> frozenset[str]:
    return follow(ebar, p.symbol, p.slot)


def rel_e(a: TreeAutomaton) -> Partition:
    """Blocks of continuation states whose unmarked continuations coincide."""
    return Partition.by_key(a.n_states, lambda i: unmark(a.keys[i].continuation))


def rel_combined(a: TreeAutomaton) -> Partition:
    """Follow equality of positions, carried by the continuation states."""
    return rel_follow(a, _ebar_of(a))


def _rel_follow_on_continuations(a: TreeAutomaton) -> Partition:
    # alternate reading: Follow taken inside each state's own continuation
    def key(i):
        p, cont = a.keys[i]
        if p == EPS:
            return first(cont, check_linear=False)
        return follow(cont, p.symbol, p.slot, check_linear=False)

    return Partition.by_key(a.n_states, key)


def is_maximal_similarity(a: TreeAutomaton, p: Partition) -> bool:
    """``p`` is a similarity and merging any two of its blocks breaks that."""
    if not is_similarity(a, p):
        return False
    blocks = p.blocks
    for i, j in combinations(range(len(blocks)), 2):
        merged = [b for k, b in enumerate(blocks) if k not in (i, j)] + [blocks[i] + blocks[j]]
        if is_similarity(a, Partition(merged)):
            return False
    return True


@dataclass(frozen=True)
class VMerge:
    """Both stages of the merged construction over the continuation automaton."""

    continuation: TreeAutomaton
    stage1_partition: Partition
    stage1: TreeAutomaton
    partition: Partition
    automaton: TreeAutomaton


def v_merge(e: RegExpr, alphabet=None, reading: str = "expression") -> VMerge:
    """Merge continuation states by Follow equality, then by shared unmarked continuations.

    Stage 1 groups states with equal Follow sets; every stage-1 block keeps
    the unmarked continuations of its members.  Stage 2 unites any two
    blocks sharing one of those continuations, closed transitively.
    ``reading="continuation"`` computes stage 1 with Follow evaluated inside
    each state's own continuation instead of the whole expression.
    """
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {READINGS}")
    c = k_c_continuation_automaton(e, alphabet)
    if isinstance(e, Zero):
        empty = Partition.discrete(0)
        return VMerge(c, empty, c, empty, c)
    stage1_p = rel_combined(c) if reading == "expression" else _rel_follow_on_continuations(c)
    stage1 = quotient(c, stage1_p)
    owner: dict[RegExpr, int] = {}
    pairs = []
    for block in stage1_p.blocks:
        for q in block:
            image = unmark(c.keys[q].continuation)
            pairs.append((block[0], q))
            if image in owner:
                pairs.append((owner[image], q))
            else:
                owner[image] = q
    final_p = Partition.from_pairs(c.n_states, pairs)
    return VMerge(c, stage1_p, stage1, final_p, quotient(c, final_p))


def v_merge_automaton(e: RegExpr, alphabet=None, reading: str = "expression") -> TreeAutomaton:
    """The automaton of :func:`v_merge`, final stage only."""
    return v_merge(e, alphabet, reading).automaton

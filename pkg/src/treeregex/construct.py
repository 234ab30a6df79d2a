"""The four automaton constructions.

``k_position_automaton`` and ``follow_automaton`` are driven by the position
functions, ``equation_automaton`` by tuple-valued partial derivatives and
``k_c_continuation_automaton`` by continuations of the linearized
expression.  All of them work on the linearized form where needed and
relabel transitions back to the original symbols.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Sequence

from .automaton import TreeAutomaton
from .posfun import EPSILON, first, follow, occurs, last
from .terms import (
    ZERO,
    Apply,
    Closure,
    Const,
    Product,
    RankedAlphabet,
    RegExpr,
    Sum,
    Zero,
    contains_constant,
    is_linear,
    linearize,
    product,
    symbols_of,
    to_text,
    unmark,
    unmark_symbol,
)

__all__ = [
    "Position",
    "EPS",
    "ContinuationState",
    "InvariantViolation",
    "WatchdogError",
    "MAX_DERIVED_TERMS",
    "linear_form",
    "positions",
    "symbol_order",
    "k_position_automaton",
    "follow_automaton",
    "f_inverse",
    "partial_derivative",
    "equation_automaton",
    "c_continuation",
    "k_c_continuation_automaton",
]

MAX_DERIVED_TERMS = 10_000


class InvariantViolation(RuntimeError):
    """Two routes that must agree by construction disagreed."""


class WatchdogError(RuntimeError):
    """The derived-term closure exceeded :data:`MAX_DERIVED_TERMS`."""


class Position(NamedTuple):
    """Slot ``slot`` of the marked symbol ``symbol``; ``EPS`` is the root sentinel."""

    symbol: str
    slot: int

    def __str__(self):
        if self.symbol == EPSILON:
            return "eps^1"
        name, _, mark = self.symbol.partition("@")
        return f"{name}^{self.slot}@{mark}" if mark else f"{name}^{self.slot}"


EPS = Position(EPSILON, 1)


class ContinuationState(NamedTuple):
    position: Position
    continuation: RegExpr

    def __str__(self):
        return f"{self.position} : {to_text(self.continuation)}"


def symbol_order(symbol: str):
    """Sort key putting ``f@2`` before ``f@10``."""
    name, _, mark = symbol.partition("@")
    return (int(mark) if mark else 0, name)


def _set_label(symbols: Iterable[str]) -> str:
    return "{" + ", ".join(sorted(symbols, key=symbol_order)) + "}"


def linear_form(e: RegExpr) -> RegExpr:
    """``e`` itself when it is already fully marked and linear, else its linearization."""
    syms = symbols_of(e)
    if syms and all("@" in s for s in syms) and is_linear(e):
        return e
    return linearize(unmark(e))


def positions(ebar: RegExpr) -> list[Position]:
    """``EPS`` followed by every ``f^k`` of the linear ``ebar``, in mark order."""
    syms = symbols_of(ebar)
    out = [EPS]
    for s in sorted(syms, key=symbol_order):
        out.extend(Position(s, k) for k in range(1, syms[s] + 1))
    return out


def _follow_of(ebar: RegExpr, x: Position) -> frozenset[str]:
    return follow(ebar, x.symbol, x.slot)


def _alphabet_for(e: RegExpr, alphabet: RankedAlphabet | Mapping[str, int] | None) -> dict[str, int]:
    if alphabet is not None:
        return dict(alphabet.symbols if isinstance(alphabet, RankedAlphabet) else alphabet)
    out = {unmark_symbol(s): a for s, a in symbols_of(e).items()}
    out.update((c, 0) for c in _constants_of(e))
    return out


def _constants_of(e: RegExpr) -> set[str]:
    if isinstance(e, Const):
        return {e.name}
    if isinstance(e, Apply):
        return set().union(*(_constants_of(a) for a in e.args))
    if isinstance(e, Sum):
        return _constants_of(e.lhs) | _constants_of(e.rhs)
    if isinstance(e, Product):
        return {e.const} | _constants_of(e.lhs) | _constants_of(e.rhs)
    if isinstance(e, Closure):
        return {e.const} | _constants_of(e.operand)
    return set()


def _empty(alphabet: Mapping[str, int]) -> TreeAutomaton:
    return TreeAutomaton((), frozenset(), frozenset(), alphabet)


# ---------------------------------------------------------------------------
# K-position automaton


def k_position_automaton(e: RegExpr, alphabet=None, *, relabel: bool = True) -> TreeAutomaton:
    """States are the positions ``f^k`` plus ``eps^1`` (the only final state).

    ``x --g(g^1..g^m)--> `` whenever ``g`` follows ``x``; constants in the
    follow set of ``x`` give leaf rules into ``x``.  With ``relabel=False``
    transitions keep the marked symbols of the linearized expression.
    """
    sigma = _alphabet_for(e, alphabet)
    if isinstance(e, Zero):
        return _empty(sigma)
    ebar = linear_form(e)
    arity = symbols_of(ebar)
    h = unmark_symbol
    if not relabel:
        sigma = {**{c: a for c, a in sigma.items() if a == 0}, **arity}
        h = str
    pos = positions(ebar)
    index = {p: i for i, p in enumerate(pos)}
    transitions = set()
    for x in pos:
        for g in _follow_of(ebar, x):
            if g in arity:
                sources = tuple(index[Position(g, k)] for k in range(1, arity[g] + 1))
                transitions.add((index[x], h(g), sources))
            else:
                transitions.add((index[x], g, ()))
    return TreeAutomaton([str(p) for p in pos], {index[EPS]}, transitions, sigma, pos)


# ---------------------------------------------------------------------------
# follow automaton


def follow_automaton(e: RegExpr, alphabet=None) -> TreeAutomaton:
    """States are the distinct sets First and Follow(f, k); First is final."""
    sigma = _alphabet_for(e, alphabet)
    if isinstance(e, Zero):
        return _empty(sigma)
    ebar = linear_form(e)
    arity = symbols_of(ebar)
    states: dict[frozenset[str], int] = {}
    for x in positions(ebar):
        states.setdefault(_follow_of(ebar, x), len(states))
    transitions = set()
    for I, q in states.items():
        for g in I:
            if g in arity:
                sources = tuple(states[follow(ebar, g, k)] for k in range(1, arity[g] + 1))
                transitions.add((q, unmark_symbol(g), sources))
            else:
                transitions.add((q, g, ()))
    keys = list(states)
    return TreeAutomaton([_set_label(s) for s in keys], {0}, transitions, sigma, keys)


# ---------------------------------------------------------------------------
# partial derivatives


def _tuples_product(tuples: Iterable[tuple[RegExpr, ...]], c: str, rhs: RegExpr) -> set:
    return {tuple(product(x, c, rhs) for x in t) for t in tuples}


@lru_cache(maxsize=1 << 16)
def f_inverse(f: str, e: RegExpr) -> frozenset[tuple[RegExpr, ...]]:
    """Tuples of expressions for the children of an ``f``-rooted tree of ``e``.

    ``f`` is compared against the (possibly marked) symbol key of each
    application, so on a linearized expression pass ``"g@3"``.
    """
    if f not in occurs(e):
        return frozenset()
    if isinstance(e, Apply):
        return frozenset({e.args}) if e.key == f else frozenset()
    if isinstance(e, Sum):
        return f_inverse(f, e.lhs) | f_inverse(f, e.rhs)
    if isinstance(e, Product):
        out = _tuples_product(f_inverse(f, e.lhs), e.const, e.rhs)
        if contains_constant(e.lhs, e.const):
            out |= f_inverse(f, e.rhs)
        return frozenset(out)
    return frozenset(_tuples_product(f_inverse(f, e.operand), e.const, e))


def partial_derivative(e: RegExpr, word: Sequence[str]) -> frozenset[RegExpr]:
    """Derived terms of ``e`` after reading the symbols of ``word`` top-down."""
    current = frozenset({e})
    for f in word:
        tuples = set().union(*(f_inverse(f, x) for x in current)) if current else set()
        if not tuples:
            return frozenset({ZERO})
        current = frozenset(x for t in tuples for x in t)
    return current


def equation_automaton(e: RegExpr, alphabet=None) -> TreeAutomaton:
    """States are ``e`` and every component reachable through ``f_inverse``.

    Works on ``e`` as given (no linearization); ``e`` is the only final state.
    """
    sigma = _alphabet_for(e, alphabet)
    if isinstance(e, Zero):
        return _empty(sigma)
    syms = symbols_of(e)
    consts = sorted(c for c, a in sigma.items() if a == 0) if alphabet is not None else sorted(
        _constants_of(e)
    )
    index: dict[RegExpr, int] = {e: 0}
    queue = deque([e])
    transitions = set()
    while queue:
        x = queue.popleft()
        q = index[x]
        for c in consts:
            if contains_constant(x, c):
                transitions.add((q, c, ()))
        for f in sorted(syms, key=symbol_order):
            for tup in f_inverse(f, x):
                sources = []
                for y in tup:
                    if y not in index:
                        if len(index) >= MAX_DERIVED_TERMS:
                            raise WatchdogError(
                                f"more than {MAX_DERIVED_TERMS} derived terms for {to_text(e)}"
                            )
                        index[y] = len(index)
                        queue.append(y)
                    sources.append(index[y])
                transitions.add((q, unmark_symbol(f), tuple(sources)))
    keys = list(index)
    return TreeAutomaton([to_text(k) for k in keys], {0}, transitions, sigma, keys)


# ---------------------------------------------------------------------------
# k-C-continuations


def c_continuation(ebar: RegExpr, pos: Position) -> RegExpr:
    """What can hang below slot ``pos.slot`` of ``pos.symbol`` in the linear ``ebar``.

    Products whose left operand reduces to ``0`` collapse to ``0``.
    """
    if pos == EPS:
        return ebar
    if pos.symbol not in occurs(ebar):
        raise KeyError(f"position {pos} does not occur in {to_text(ebar)}")
    return _cont(ebar, pos.symbol, pos.slot)


def _cont(e: RegExpr, f: str, k: int) -> RegExpr:
    if isinstance(e, Apply):
        if e.key == f:
            return e.args[k - 1]
        for arg in e.args:
            if f in occurs(arg):
                return _cont(arg, f, k)
    elif isinstance(e, Sum):
        return _cont(e.lhs if f in occurs(e.lhs) else e.rhs, f, k)
    elif isinstance(e, Product):
        if f in occurs(e.lhs):
            return product(_cont(e.lhs, f, k), e.const, e.rhs)
        if e.const in last(e.lhs, check_linear=False):
            return _cont(e.rhs, f, k)
        return ZERO
    elif isinstance(e, Closure):
        return product(_cont(e.operand, f, k), e.const, e)
    raise KeyError(f)


def k_c_continuation_automaton(e: RegExpr, alphabet=None) -> TreeAutomaton:
    """States pair each position with its continuation; ``(eps^1, ebar)`` is final.

    A rule ``x --g--> `` exists when the tuple of continuations of ``g`` is a
    member of ``g``'s inverse image of the continuation of ``x``.  The
    shortcut through Follow is evaluated too and must agree.
    """
    sigma = _alphabet_for(e, alphabet)
    if isinstance(e, Zero):
        return _empty(sigma)
    ebar = linear_form(e)
    arity = symbols_of(ebar)
    pos = positions(ebar)
    index = {p: i for i, p in enumerate(pos)}
    cont = {p: c_continuation(ebar, p) for p in pos}
    consts = sorted(_constants_of(ebar))
    transitions = set()
    for x in pos:
        cx = cont[x]
        followers = _follow_of(ebar, x)
        for c in consts:
            if contains_constant(cx, c):
                transitions.add((index[x], c, ()))
            if contains_constant(cx, c) != (c in followers):
                raise InvariantViolation(
                    f"constant {c} vs Follow disagree at {x} in {to_text(ebar)}"
                )
        for g in sorted(arity, key=symbol_order):
            tuples = f_inverse(g, cx)
            wanted = tuple(cont[Position(g, k)] for k in range(1, arity[g] + 1))
            member = wanted in tuples
            if member != (g in followers) or bool(tuples) != member:
                raise InvariantViolation(
                    f"inverse image of {g} at {x} disagrees with Follow in {to_text(ebar)}"
                )
            if member:
                sources = tuple(index[Position(g, k)] for k in range(1, arity[g] + 1))
                transitions.add((index[x], unmark_symbol(g), sources))
    keys = [ContinuationState(p, cont[p]) for p in pos]
    labels = [str(p) if p == EPS else f"{p} : {to_text(cont[p])}" for p in pos]
    labels[0] = f"eps^1 : {to_text(ebar)}"
    return TreeAutomaton(labels, {index[EPS]}, transitions, sigma, keys)

"""First, Follow and Last over linear expressions.

Symbol sets are frozensets of strings: constants by name, marked symbols as
``name@mark``.  The sentinel position ``eps^1`` is represented by
:data:`EPSILON`; its Follow set is First.
"""

from __future__ import annotations

from functools import lru_cache

from .terms import Apply, Closure, Const, Product, RegExpr, Sum, Zero, contains_constant, is_linear

__all__ = ["EPSILON", "NonLinearError", "first", "follow", "last", "occurs"]

EPSILON = ""
"""Symbol key of the sentinel position; never a valid symbol name."""


class NonLinearError(ValueError):
    pass


def _check(e: RegExpr):
    if not is_linear(e):
        raise NonLinearError("position functions need a linear expression; linearize first")


@lru_cache(maxsize=1 << 16)
def occurs(e: RegExpr) -> frozenset[str]:
    """Keys of the non-constant symbols occurring in ``e``."""
    if isinstance(e, Apply):
        return frozenset({e.key}).union(*(occurs(a) for a in e.args))
    if isinstance(e, (Sum, Product)):
        return occurs(e.lhs) | occurs(e.rhs)
    if isinstance(e, Closure):
        return occurs(e.operand)
    return frozenset()


@lru_cache(maxsize=1 << 16)
def _first(e: RegExpr) -> frozenset[str]:
    if isinstance(e, Zero):
        return frozenset()
    if isinstance(e, Const):
        return frozenset({e.name})
    if isinstance(e, Apply):
        return frozenset({e.key})
    if isinstance(e, Sum):
        return _first(e.lhs) | _first(e.rhs)
    if isinstance(e, Product):
        if contains_constant(e.lhs, e.const):
            return (_first(e.lhs) - {e.const}) | _first(e.rhs)
        return _first(e.lhs)
    return _first(e.operand) | {e.const}


@lru_cache(maxsize=1 << 16)
def _last(e: RegExpr) -> frozenset[str]:
    if isinstance(e, Zero):
        return frozenset()
    if isinstance(e, Const):
        return frozenset({e.name})
    if isinstance(e, Apply):
        return frozenset().union(*(_last(a) for a in e.args))
    if isinstance(e, Sum):
        return _last(e.lhs) | _last(e.rhs)
    if isinstance(e, Product):
        left = _last(e.lhs)
        if e.const in left:
            return (left - {e.const}) | _last(e.rhs)
        return left
    return _last(e.operand) | {e.const}


@lru_cache(maxsize=1 << 16)
def _follow(e: RegExpr, f: str, k: int) -> frozenset[str]:
    if isinstance(e, (Zero, Const)):
        return frozenset()
    if isinstance(e, Apply):
        if e.key == f:
            return _first(e.args[k - 1])
        for arg in e.args:
            if f in occurs(arg):
                return _follow(arg, f, k)
        return frozenset()
    if isinstance(e, Sum):
        if f in occurs(e.lhs):
            return _follow(e.lhs, f, k)
        if f in occurs(e.rhs):
            return _follow(e.rhs, f, k)
        return frozenset()
    if isinstance(e, Product):
        c = e.const
        left = _follow(e.lhs, f, k)
        # the guards are read as ordered, mutually exclusive cases
        if c in left:
            return (left - {c}) | _first(e.rhs)
        if f in occurs(e.lhs):
            return left
        if f in occurs(e.rhs) and c in _last(e.lhs):
            return _follow(e.rhs, f, k)
        return frozenset()
    inner = _follow(e.operand, f, k)
    if e.const in inner:
        return inner | _first(e.operand)
    return inner


def first(e: RegExpr, *, check_linear: bool = True) -> frozenset[str]:
    """Symbols that root some tree of the language of ``e``."""
    if check_linear:
        _check(e)
    return _first(e)


def last(e: RegExpr, *, check_linear: bool = True) -> frozenset[str]:
    """Constants occurring as a leaf of some tree of the language of ``e``."""
    if check_linear:
        _check(e)
    return _last(e)


def follow(e: RegExpr, f: str, k: int, *, check_linear: bool = True) -> frozenset[str]:
    """Symbols that can label the ``k``-th child of an ``f`` node.

    ``f`` is a marked symbol key such as ``"g@3"``, or :data:`EPSILON`
    (with ``k == 1``) for the root position.
    """
    if check_linear:
        _check(e)
    if f == EPSILON:
        if k != 1:
            raise ValueError("the root position only has slot 1")
        return _first(e)
    if k < 1:
        raise ValueError("slots are numbered from 1")
    return _follow(e, f, k)

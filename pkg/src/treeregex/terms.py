"""Ranked alphabets, trees and regular tree expressions.

Expressions are immutable dataclass trees.  A linearized expression carries
an integer ``mark`` on every symbol application; the marked symbol is then
written ``name@mark`` wherever a flat string is needed (position sets, tree
roots of marked trees).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as cartesian
from typing import Iterable, Mapping, Union

__all__ = [
    "ParseError",
    "RankedAlphabet",
    "Tree",
    "Zero",
    "Const",
    "Apply",
    "Sum",
    "Product",
    "Closure",
    "RegExpr",
    "ZERO",
    "product",
    "closure",
    "parse_alphabet",
    "parse_expr",
    "parse_tree",
    "to_text",
    "linearize",
    "unmark",
    "unmark_symbol",
    "unmark_tree",
    "is_linear",
    "symbols_of",
    "ast_size",
    "contains_constant",
    "enumerate_language",
    "all_trees",
]


class ParseError(ValueError):
    """Malformed alphabet, expression or tree text."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


_NAME = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")


@dataclass(frozen=True)
class RankedAlphabet:
    symbols: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "symbols", dict(self.symbols))
        for name, arity in self.symbols.items():
            if arity < 0:
                raise ValueError(f"negative arity for {name!r}")

    def __hash__(self):
        return hash(tuple(sorted(self.symbols.items())))

    def __contains__(self, name: str) -> bool:
        return name in self.symbols

    def arity(self, name: str) -> int:
        return self.symbols[name]

    @property
    def constants(self) -> list[str]:
        return sorted(n for n, a in self.symbols.items() if a == 0)

    @property
    def functions(self) -> list[str]:
        """Symbols of rank at least one."""
        return sorted(n for n, a in self.symbols.items() if a > 0)

    def is_constant(self, name: str) -> bool:
        return self.symbols.get(name) == 0

    def __str__(self):
        return " ".join(f"{n}:{a}" for n, a in self.symbols.items())


def parse_alphabet(text: str) -> RankedAlphabet:
    """Parse whitespace separated ``name:arity`` declarations."""
    symbols: dict[str, int] = {}
    for m in re.finditer(r"\S+", text):
        token, pos = m.group(), m.start()
        name, sep, arity = token.partition(":")
        if not sep or not _NAME.fullmatch(name):
            raise ParseError(f"expected name:arity, got {token!r}", pos)
        if not re.fullmatch(r"-?\d+", arity):
            raise ParseError(f"bad arity in {token!r}", pos)
        if int(arity) < 0:
            raise ParseError(f"negative arity in {token!r}", pos)
        if name in symbols:
            raise ParseError(f"duplicate symbol {name!r}", pos)
        symbols[name] = int(arity)
    return RankedAlphabet(symbols)


# ---------------------------------------------------------------------------
# trees


@dataclass(frozen=True, slots=True)
class Tree:
    root: str
    children: tuple[Tree, ...] = ()
    size: int = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "size", 1 + sum(c.size for c in self.children))
        object.__setattr__(self, "_hash", hash((self.root, self.children)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        if not self.children:
            return self.root
        return f"{self.root}({','.join(map(str, self.children))})"

    def leaves(self) -> set[str]:
        if not self.children:
            return {self.root}
        return set().union(*(c.leaves() for c in self.children))

    def subtrees(self):
        yield self
        for c in self.children:
            yield from c.subtrees()


def unmark_symbol(symbol: str) -> str:
    return symbol.partition("@")[0]


def unmark_tree(t: Tree) -> Tree:
    return Tree(unmark_symbol(t.root), tuple(unmark_tree(c) for c in t.children))


# ---------------------------------------------------------------------------
# expressions


@dataclass(frozen=True)
class Zero:
    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Apply:
    symbol: str
    args: tuple["RegExpr", ...]
    mark: int | None = None

    @property
    def key(self) -> str:
        """The (possibly marked) symbol as it appears in position sets."""
        return self.symbol if self.mark is None else f"{self.symbol}@{self.mark}"

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Sum:
    lhs: "RegExpr"
    rhs: "RegExpr"

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Product:
    lhs: "RegExpr"
    const: str
    rhs: "RegExpr"

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Closure:
    operand: "RegExpr"
    const: str

    def __str__(self):
        return to_text(self)


RegExpr = Union[Zero, Const, Apply, Sum, Product, Closure]
ZERO = Zero()


def _cached_hash(self):
    # expressions are hashed constantly as cache and dict keys
    try:
        return self.__dict__["_h"]
    except KeyError:
        h = hash((type(self).__name__,) + tuple(self.__dict__[f] for f in self.__dataclass_fields__))
        self.__dict__["_h"] = h
        return h


for _cls in (Zero, Const, Apply, Sum, Product, Closure):
    _cls.__hash__ = _cached_hash


def product(lhs: RegExpr, const: str, rhs: RegExpr) -> RegExpr:
    """c-product with the single reduction ``0 .c E = 0``."""
    if isinstance(lhs, Zero):
        return ZERO
    return Product(lhs, const, rhs)


def closure(operand: RegExpr, const: str) -> RegExpr:
    return Closure(operand, const)


def ast_size(e: RegExpr) -> int:
    if isinstance(e, (Zero, Const)):
        return 1
    if isinstance(e, Apply):
        return 1 + sum(ast_size(a) for a in e.args)
    if isinstance(e, (Sum, Product)):
        return 1 + ast_size(e.lhs) + ast_size(e.rhs)
    return 1 + ast_size(e.operand)


def _apply_nodes(e: RegExpr):
    if isinstance(e, Apply):
        yield e
        for a in e.args:
            yield from _apply_nodes(a)
    elif isinstance(e, (Sum, Product)):
        yield from _apply_nodes(e.lhs)
        yield from _apply_nodes(e.rhs)
    elif isinstance(e, Closure):
        yield from _apply_nodes(e.operand)


def symbols_of(e: RegExpr) -> dict[str, int]:
    """Map every (marked) non-constant symbol key occurring in ``e`` to its arity."""
    return {node.key: len(node.args) for node in _apply_nodes(e)}


def is_linear(e: RegExpr) -> bool:
    keys = [node.key for node in _apply_nodes(e)]
    return len(keys) == len(set(keys))


def linearize(e: RegExpr) -> RegExpr:
    """Mark symbol applications 1..n in left-to-right preorder."""
    counter = 0

    def walk(x: RegExpr) -> RegExpr:
        nonlocal counter
        if isinstance(x, Apply):
            counter += 1
            mark = counter
            return Apply(x.symbol, tuple(walk(a) for a in x.args), mark)
        if isinstance(x, Sum):
            lhs = walk(x.lhs)
            return Sum(lhs, walk(x.rhs))
        if isinstance(x, Product):
            lhs = walk(x.lhs)
            return Product(lhs, x.const, walk(x.rhs))
        if isinstance(x, Closure):
            return Closure(walk(x.operand), x.const)
        return x

    return walk(e)


def unmark(e: RegExpr) -> RegExpr:
    if isinstance(e, Apply):
        return Apply(e.symbol, tuple(unmark(a) for a in e.args))
    if isinstance(e, Sum):
        return Sum(unmark(e.lhs), unmark(e.rhs))
    if isinstance(e, Product):
        return Product(unmark(e.lhs), e.const, unmark(e.rhs))
    if isinstance(e, Closure):
        return Closure(unmark(e.operand), e.const)
    return e


@lru_cache(maxsize=1 << 16)
def contains_constant(e: RegExpr, c: str) -> bool:
    """Whether the one-node tree ``c`` belongs to the language of ``e``."""
    if isinstance(e, Const):
        return e.name == c
    if isinstance(e, Sum):
        return contains_constant(e.lhs, c) or contains_constant(e.rhs, c)
    if isinstance(e, Product):
        d = e.const
        return (c != d and contains_constant(e.lhs, c)) or (
            contains_constant(e.lhs, d) and contains_constant(e.rhs, c)
        )
    if isinstance(e, Closure):
        return c == e.const or contains_constant(e.operand, c)
    return False


# ---------------------------------------------------------------------------
# printing and parsing

_SUM, _PROD, _POST = 0, 1, 2


def _level(e: RegExpr) -> int:
    if isinstance(e, Sum):
        return _SUM
    if isinstance(e, Product):
        return _PROD
    return _POST


def to_text(e: RegExpr) -> str:
    """Canonical text, parseable by :func:`parse_expr`.  Minimal parentheses."""

    def wrap(x: RegExpr, need: int) -> str:
        s = to_text(x)
        return f"({s})" if _level(x) < need else s

    if isinstance(e, Zero):
        return "0"
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Apply):
        return f"{e.key}({','.join(to_text(a) for a in e.args)})"
    if isinstance(e, Sum):
        return f"{wrap(e.lhs, _SUM)} + {wrap(e.rhs, _PROD)}"
    if isinstance(e, Product):
        return f"{wrap(e.lhs, _PROD)} .[{e.const}] {wrap(e.rhs, _POST)}"
    return f"{wrap(e.operand, _POST)}*[{e.const}]"


_TOKEN = re.compile(
    r"\s*(?:(?P<name>[a-zA-Z][a-zA-Z0-9_]*(?:@\d+)?)|(?P<zero>0)|(?P<op>[()\[\],.*+]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, alphabet: RankedAlphabet):
        self.tokens = _tokenize(text)
        self.i = 0
        self.alphabet = alphabet

    def peek(self, value: str | None = None) -> bool:
        kind, tok, _ = self.tokens[self.i]
        return kind != "end" and (value is None or tok == value)

    def expect(self, value: str):
        kind, tok, pos = self.tokens[self.i]
        if tok != value or kind == "end":
            raise ParseError(f"expected {value!r}, got {tok or 'end of input'!r}", pos)
        self.i += 1

    def constant(self) -> str:
        kind, tok, pos = self.tokens[self.i]
        if kind != "name":
            raise ParseError(f"expected a constant, got {tok or 'end of input'!r}", pos)
        if not self.alphabet.is_constant(tok):
            raise ParseError(f"{tok!r} is not a constant of the alphabet", pos)
        self.i += 1
        return tok

    def parse(self) -> RegExpr:
        e = self.expr()
        kind, tok, pos = self.tokens[self.i]
        if kind != "end":
            raise ParseError(f"unexpected {tok!r}", pos)
        return e

    def expr(self) -> RegExpr:
        e = self.prod()
        while self.peek("+"):
            self.i += 1
            e = Sum(e, self.prod())
        return e

    def prod(self) -> RegExpr:
        e = self.post()
        while self.peek("."):
            self.i += 1
            self.expect("[")
            c = self.constant()
            self.expect("]")
            e = Product(e, c, self.post())
        return e

    def post(self) -> RegExpr:
        e = self.atom()
        while self.peek("*"):
            self.i += 1
            self.expect("[")
            c = self.constant()
            self.expect("]")
            e = Closure(e, c)
        return e

    def atom(self) -> RegExpr:
        kind, tok, pos = self.tokens[self.i]
        if kind == "zero":
            self.i += 1
            return ZERO
        if tok == "(" and kind == "op":
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        if kind != "name":
            raise ParseError(f"unexpected {tok or 'end of input'!r}", pos)
        self.i += 1
        name, _, mark = tok.partition("@")
        if name not in self.alphabet:
            raise ParseError(f"unknown symbol {name!r}", pos)
        arity = self.alphabet.arity(name)
        if arity == 0:
            if mark:
                raise ParseError(f"constant {name!r} cannot be marked", pos)
            return Const(name)
        self.expect("(")
        args = [self.expr()]
        while self.peek(","):
            self.i += 1
            args.append(self.expr())
        self.expect(")")
        if len(args) != arity:
            raise ParseError(
                f"{name!r} has arity {arity} but is applied to {len(args)} argument(s)", pos
            )
        return Apply(name, tuple(args), int(mark) if mark else None)


def _has_inner_zero(e: RegExpr) -> bool:
    if isinstance(e, Apply):
        return any(isinstance(a, Zero) or _has_inner_zero(a) for a in e.args)
    if isinstance(e, (Sum, Product)):
        kids = (e.lhs, e.rhs)
    elif isinstance(e, Closure):
        kids = (e.operand,)
    else:
        return False
    return any(isinstance(k, Zero) or _has_inner_zero(k) for k in kids)


def parse_expr(text: str, alphabet: RankedAlphabet) -> RegExpr:
    """Parse a regular tree expression.

    Precedence from tightest: ``*[c]``, ``.[c]`` (left associative), ``+``.
    ``0`` is accepted only as the whole expression.
    """
    e = _Parser(text, alphabet).parse()
    if _has_inner_zero(e):
        raise ParseError("0 may only appear as the whole expression")
    return e


def parse_tree(text: str, alphabet: RankedAlphabet | None = None) -> Tree:
    """Parse a tree literal such as ``g(f(b),a)``."""
    tokens = _tokenize(text)
    i = 0

    def node() -> Tree:
        nonlocal i
        kind, tok, pos = tokens[i]
        if kind != "name":
            raise ParseError(f"expected a symbol, got {tok or 'end of input'!r}", pos)
        i += 1
        children = []
        if tokens[i][1] == "(" and tokens[i][0] == "op":
            i += 1
            children.append(node())
            while tokens[i][1] == ",":
                i += 1
                children.append(node())
            if tokens[i][1] != ")":
                raise ParseError("expected ')'", tokens[i][2])
            i += 1
        if alphabet is not None:
            name = unmark_symbol(tok)
            if name not in alphabet:
                raise ParseError(f"unknown symbol {name!r}", pos)
            if alphabet.arity(name) != len(children):
                raise ParseError(
                    f"{name!r} has arity {alphabet.arity(name)}, got {len(children)} children",
                    pos,
                )
        return Tree(tok, tuple(children))

    t = node()
    if tokens[i][0] != "end":
        raise ParseError(f"unexpected {tokens[i][1]!r}", tokens[i][2])
    return t


# ---------------------------------------------------------------------------
# bounded language enumeration (the semantic oracle)


def _substitute(t: Tree, c: str, lang: frozenset[Tree], budget: int) -> set[Tree]:
    """All trees of ``t{c <- lang}`` with at most ``budget`` nodes."""
    if not t.children:
        if t.root == c:
            return {s for s in lang if s.size <= budget}
        return {t} if budget >= 1 else set()
    # every node of t survives substitution, so t.size bounds the result from below
    if t.size > budget:
        return set()
    slack = budget - t.size
    options = [_substitute(ch, c, lang, ch.size + slack) for ch in t.children]
    out = set()
    for combo in cartesian(*options):
        if 1 + sum(s.size for s in combo) <= budget:
            out.add(Tree(t.root, combo))
    return out


def _c_product(left: Iterable[Tree], c: str, right: frozenset[Tree], n: int) -> set[Tree]:
    out: set[Tree] = set()
    for t in left:
        out |= _substitute(t, c, right, n)
    return out


def enumerate_language(e: RegExpr, max_nodes: int) -> frozenset[Tree]:
    """Every tree of the language of ``e`` having at most ``max_nodes`` nodes.

    A direct transcription of the set semantics; marked symbols yield marked
    tree roots (``f@1``).  Exponential, intended as a test oracle only.
    """
    if max_nodes < 1:
        raise ValueError("max_nodes must be >= 1")
    return _enum(e, max_nodes, {})


def _enum(e: RegExpr, n: int, memo: dict) -> frozenset[Tree]:
    key = (id(e), n)
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(e, Zero):
        out: frozenset[Tree] = frozenset()
    elif isinstance(e, Const):
        out = frozenset({Tree(e.name)})
    elif isinstance(e, Apply):
        m = len(e.args)
        if n < 1 + m:
            out = frozenset()
        else:
            kids = [_enum(a, n - m, memo) for a in e.args]
            out = frozenset(
                Tree(e.key, combo)
                for combo in cartesian(*kids)
                if 1 + sum(s.size for s in combo) <= n
            )
    elif isinstance(e, Sum):
        out = _enum(e.lhs, n, memo) | _enum(e.rhs, n, memo)
    elif isinstance(e, Product):
        out = frozenset(_c_product(_enum(e.lhs, n, memo), e.const, _enum(e.rhs, n, memo), n))
    else:
        base = _enum(e.operand, n, memo)
        c = e.const
        acc = frozenset({Tree(c)})
        while True:
            grown = acc | _c_product(base, c, acc, n)
            if grown == acc:
                break
            acc = frozenset(grown)
        out = acc
    # keep e alive so id() stays unique for the lifetime of memo
    memo[key] = (e, out)
    return out


def all_trees(alphabet: RankedAlphabet | Mapping[str, int], max_nodes: int) -> list[Tree]:
    """Every tree over ``alphabet`` with at most ``max_nodes`` nodes, children before parents."""
    symbols = alphabet.symbols if isinstance(alphabet, RankedAlphabet) else dict(alphabet)
    by_size: dict[int, list[Tree]] = {}
    for size in range(1, max_nodes + 1):
        level: list[Tree] = []
        for name, arity in sorted(symbols.items()):
            if arity == 0:
                if size == 1:
                    level.append(Tree(name))
                continue
            for split in _compositions(size - 1, arity):
                pools = [by_size.get(s, []) for s in split]
                level.extend(Tree(name, combo) for combo in cartesian(*pools))
        by_size[size] = level
    return [t for size in range(1, max_nodes + 1) for t in by_size[size]]


def _compositions(total: int, parts: int):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest

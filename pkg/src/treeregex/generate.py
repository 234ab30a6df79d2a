"""Seeded random expressions and counterexample shrinking."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .terms import (
    Apply,
    Closure,
    Const,
    Product,
    RankedAlphabet,
    RegExpr,
    Sum,
    ast_size,
    parse_alphabet,
)

__all__ = ["GeneratorConfig", "OPERATORS", "generate_expr", "generate_many", "shrink", "EXAMPLE_ALPHABET"]

EXAMPLE_ALPHABET = parse_alphabet("a:0 b:0 c:0 f:1 h:1 g:2")
OPERATORS = ("const", "apply", "sum", "product", "closure")

# minimum AST nodes for a node of each kind (apply depends on arity)
_MIN_SIZE = {"const": 1, "sum": 3, "product": 3, "closure": 2}


@dataclass(frozen=True)
class GeneratorConfig:
    max_ast_nodes: int = 12
    alphabet: RankedAlphabet = EXAMPLE_ALPHABET
    seed: int = 0
    weights: dict = field(
        default_factory=lambda: {"const": 3.0, "apply": 3.0, "sum": 1.5, "product": 1.5, "closure": 1.5}
    )

    def __post_init__(self):
        unknown = set(self.weights) - set(OPERATORS)
        if unknown:
            raise ValueError(f"unknown operator weights: {sorted(unknown)}")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("weights must be nonnegative")
        if self.max_ast_nodes < 1:
            raise ValueError("max_ast_nodes must be at least 1")
        if not self.alphabet.constants:
            raise ValueError("the alphabet needs at least one constant")
        if self.weights.get("const", 0) <= 0:
            raise ValueError("the constant weight must be positive")


def _pick(rng: random.Random, cfg: GeneratorConfig, budget: int) -> str:
    kinds, weights = [], []
    min_apply = 1 + min((cfg.alphabet.arity(f) for f in cfg.alphabet.functions), default=budget + 1)
    for k in OPERATORS:
        need = min_apply if k == "apply" else _MIN_SIZE[k]
        w = cfg.weights.get(k, 0)
        if w > 0 and need <= budget:
            kinds.append(k)
            weights.append(w)
    return rng.choices(kinds, weights)[0]


def _gen(rng: random.Random, cfg: GeneratorConfig, budget: int) -> RegExpr:
    sigma = cfg.alphabet
    consts = sorted(sigma.constants)
    kind = _pick(rng, cfg, budget)
    if kind == "const":
        return Const(rng.choice(consts))
    if kind == "apply":
        fs = [f for f in sorted(sigma.functions) if 1 + sigma.arity(f) <= budget]
        f = rng.choice(fs)
        m = sigma.arity(f)
        spare = budget - 1 - m
        args = []
        for _ in range(m):
            extra = rng.randint(0, spare)
            args.append(_gen(rng, cfg, 1 + extra))
            spare -= ast_size(args[-1]) - 1
        return Apply(f, tuple(args))
    if kind == "closure":
        return Closure(_gen(rng, cfg, budget - 1), rng.choice(consts))
    left_budget = rng.randint(1, budget - 2)
    lhs = _gen(rng, cfg, left_budget)
    rhs = _gen(rng, cfg, budget - 1 - ast_size(lhs))
    if kind == "sum":
        return Sum(lhs, rhs)
    return Product(lhs, rng.choice(consts), rhs)


def generate_expr(config: GeneratorConfig) -> RegExpr:
    """One expression of at most ``config.max_ast_nodes`` nodes, determined by the seed."""
    rng = random.Random(config.seed)
    return _gen(rng, config, rng.randint(1, config.max_ast_nodes))


def generate_many(config: GeneratorConfig, count: int) -> list[RegExpr]:
    """``count`` expressions drawn from one stream seeded by ``config.seed``."""
    rng = random.Random(config.seed)
    return [_gen(rng, config, rng.randint(1, config.max_ast_nodes)) for _ in range(count)]


def _children(e: RegExpr) -> tuple:
    if isinstance(e, Apply):
        return e.args
    if isinstance(e, (Sum, Product)):
        return (e.lhs, e.rhs)
    if isinstance(e, Closure):
        return (e.operand,)
    return ()


def _rebuild(e: RegExpr, kids: tuple) -> RegExpr:
    if isinstance(e, Apply):
        return Apply(e.symbol, kids, e.mark)
    if isinstance(e, Sum):
        return Sum(*kids)
    if isinstance(e, Product):
        return Product(kids[0], e.const, kids[1])
    return Closure(kids[0], e.const)


def _candidates(e: RegExpr, consts: list[str]) -> Iterator[RegExpr]:
    """Single-step simplifications: a subexpression becomes a constant or one of its operands."""
    for c in consts:
        if e != Const(c):
            yield Const(c)
    kids = _children(e)
    yield from kids
    for i, kid in enumerate(kids):
        for smaller in _candidates(kid, consts):
            yield _rebuild(e, kids[:i] + (smaller,) + kids[i + 1 :])


def shrink(e: RegExpr, fails: Callable[[RegExpr], bool], consts) -> RegExpr:
    """Greedily replace subexpressions by smaller ones while ``fails`` stays true."""
    consts = sorted(consts)
    current = e
    improved = True
    while improved:
        improved = False
        for cand in sorted(_candidates(current, consts), key=ast_size):
            if ast_size(cand) < ast_size(current) and fails(cand):
                current = cand
                improved = True
                break
    return current


"""Bottom-up nondeterministic finite tree automata."""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .terms import Tree

__all__ = [
    "Transition",
    "TreeAutomaton",
    "Partition",
    "run",
    "accepts",
    "quotient",
    "is_similarity",
    "isomorphic",
    "is_isomorphism",
    "run_all",
    "to_json",
    "from_json",
    "to_dot",
]

Transition = tuple[int, str, tuple[int, ...]]
"""``(target, symbol, sources)``; constants have an empty source tuple."""


@dataclass(frozen=True, eq=False)
class TreeAutomaton:
    """A bottom-up FTA over integer states ``0..n-1``.

    ``keys`` holds the semantic identity of each state (a position, a set of
    symbols, an expression, ...) and ``labels`` its display text.
    """

    labels: tuple[str, ...]
    finals: frozenset[int]
    transitions: frozenset[Transition]
    alphabet: Mapping[str, int]
    keys: tuple[Hashable, ...] = None
    _index: dict = field(default=None, init=False, repr=False)

    def __post_init__(self):
        n = len(self.labels)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        sigma = getattr(self.alphabet, "symbols", self.alphabet)
        object.__setattr__(self, "alphabet", dict(sigma))
        if self.keys is None:
            object.__setattr__(self, "keys", self.labels)
        else:
            object.__setattr__(self, "keys", tuple(self.keys))
        if len(self.keys) != n:
            raise ValueError("keys and labels differ in length")
        if any(not 0 <= q < n for q in self.finals):
            raise ValueError("final state out of range")
        for target, symbol, sources in self.transitions:
            if symbol not in self.alphabet:
                raise ValueError(f"transition symbol {symbol!r} not in alphabet")
            if len(sources) != self.alphabet[symbol]:
                raise ValueError(f"transition arity mismatch for {symbol!r}")
            if not 0 <= target < n or any(not 0 <= s < n for s in sources):
                raise ValueError("transition references an unknown state")
        by_symbol = defaultdict(list)
        for t in self.transitions:
            by_symbol[t[1]].append(t)
        object.__setattr__(self, "_index", dict(by_symbol))

    @property
    def n_states(self) -> int:
        return len(self.labels)

    @property
    def n_transitions(self) -> int:
        return len(self.transitions)

    def by_symbol(self, symbol: str) -> list[Transition]:
        return self._index.get(symbol, [])

    def sorted_transitions(self) -> list[Transition]:
        return sorted(self.transitions)

    def relabel_symbols(self, h: Callable[[str], str], alphabet: Mapping[str, int]) -> TreeAutomaton:
        """Replace every transition symbol ``s`` by ``h(s)``; states are untouched."""
        return TreeAutomaton(
            self.labels,
            self.finals,
            {(q, h(s), src) for q, s, src in self.transitions},
            alphabet,
            self.keys,
        )

    def summary(self) -> str:
        return f"{self.n_states} states, {self.n_transitions} transitions"

    def __repr__(self):
        return f"<TreeAutomaton {self.summary()}>"


def run(a: TreeAutomaton, t: Tree) -> frozenset[int]:
    """The set of states reachable at the root of ``t``."""
    if t.root not in a.alphabet:
        raise KeyError(f"symbol {t.root!r} not in the automaton's alphabet")
    if a.alphabet[t.root] != len(t.children):
        raise ValueError(f"{t.root!r} has arity {a.alphabet[t.root]}")
    below = [run(a, c) for c in t.children]
    return frozenset(
        q
        for q, _, sources in a.by_symbol(t.root)
        if all(s in S for s, S in zip(sources, below))
    )


def run_all(a: TreeAutomaton, trees: Iterable[Tree]) -> dict[Tree, int]:
    """Reachable state sets of many trees at once, as bitmasks.

    ``trees`` must list every subtree before the trees containing it (the
    order produced by ``all_trees``).  Results are memoised on the symbol and
    the children's bitmasks, so shared shapes are evaluated once.
    """
    rules: dict[str, list[tuple[int, tuple[int, ...]]]] = defaultdict(list)
    for q, s, src in a.transitions:
        rules[s].append((q, src))
    memo: dict[tuple, int] = {}
    out: dict[Tree, int] = {}
    for t in trees:
        key = (t.root, tuple(out[c] for c in t.children))
        mask = memo.get(key)
        if mask is None:
            mask = 0
            child_masks = key[1]
            for q, src in rules.get(t.root, ()):
                if len(src) == len(child_masks) and all(m >> x & 1 for x, m in zip(src, child_masks)):
                    mask |= 1 << q
            memo[key] = mask
        out[t] = mask
    return out


def accepts(a: TreeAutomaton, t: Tree) -> bool:
    return not run(a, t).isdisjoint(a.finals)


# ---------------------------------------------------------------------------
# partitions and quotients


@dataclass(frozen=True)
class Partition:
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = sorted(tuple(sorted(b)) for b in self.blocks)
        if any(not b for b in blocks):
            raise ValueError("empty block")
        object.__setattr__(self, "blocks", tuple(blocks))
        members = [q for b in blocks for q in b]
        if len(members) != len(set(members)):
            raise ValueError("blocks overlap")
        if members and sorted(members) != list(range(len(members))):
            raise ValueError("blocks must cover 0..n-1")

    @classmethod
    def discrete(cls, n: int) -> Partition:
        return cls(tuple((q,) for q in range(n)))

    @classmethod
    def by_key(cls, n: int, key: Callable[[int], Hashable]) -> Partition:
        """Group states with equal ``key(q)``."""
        groups: dict[Hashable, list[int]] = defaultdict(list)
        for q in range(n):
            groups[key(q)].append(q)
        return cls(tuple(tuple(g) for g in groups.values()))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> Partition:
        """Equivalence closure of ``pairs`` over states ``0..n-1``."""
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for p, q in pairs:
            rp, rq = find(p), find(q)
            if rp != rq:
                parent[max(rp, rq)] = min(rp, rq)
        return cls.by_key(n, find)

    @property
    def n_states(self) -> int:
        return sum(len(b) for b in self.blocks)

    def block_of(self) -> list[int]:
        """State -> block index."""
        out = [0] * self.n_states
        for i, b in enumerate(self.blocks):
            for q in b:
                out[q] = i
        return out

    def join(self, other: Partition) -> Partition:
        """The finest partition coarser than both."""
        pairs = [(b[0], q) for part in (self, other) for b in part.blocks for q in b[1:]]
        return Partition.from_pairs(self.n_states, pairs)

    def refines(self, other: Partition) -> bool:
        where = other.block_of()
        return all(len({where[q] for q in b}) == 1 for b in self.blocks)

    def __len__(self):
        return len(self.blocks)


def quotient(a: TreeAutomaton, p: Partition) -> TreeAutomaton:
    """Blockwise image: a block transition exists iff some member transition does."""
    if p.n_states != a.n_states:
        raise ValueError("partition does not cover the automaton's states")
    where = p.block_of()
    labels = [
        a.labels[b[0]] if len(b) == 1 else "{" + ", ".join(a.labels[q] for q in b) + "}"
        for b in p.blocks
    ]
    keys = [tuple(a.keys[q] for q in b) for b in p.blocks]
    return TreeAutomaton(
        labels,
        {where[q] for q in a.finals},
        {(where[q], s, tuple(where[x] for x in src)) for q, s, src in a.transitions},
        a.alphabet,
        keys,
    )


def is_similarity(a: TreeAutomaton, p: Partition) -> bool:
    """Whether related states have exactly the same incoming transitions."""
    incoming: dict[int, set] = defaultdict(set)
    for q, s, src in a.transitions:
        incoming[q].add((s, src))
    return all(
        incoming[q] == incoming[b[0]] for b in p.blocks for q in b[1:]
    )


# ---------------------------------------------------------------------------
# isomorphism


def _refine_colours(autos: Sequence[TreeAutomaton]) -> list[list[int]]:
    """Joint colour refinement; equal colours are a necessary condition for pairing."""
    colours = [[int(q in a.finals) for q in range(a.n_states)] for a in autos]
    n_classes = len({c for cs in colours for c in cs})
    while True:
        sigs = []
        for a, col in zip(autos, colours):
            env: dict[int, Counter] = defaultdict(Counter)
            for q, s, src in a.transitions:
                ctx = (s, col[q], tuple(col[x] for x in src))
                env[q][("in",) + ctx] += 1
                for i, x in enumerate(src):
                    env[x][("out", i) + ctx] += 1
            sigs.append([(col[q], tuple(sorted(env[q].items()))) for q in range(a.n_states)])
        palette = {sig: i for i, sig in enumerate(sorted({s for ss in sigs for s in ss}))}
        colours = [[palette[s] for s in ss] for ss in sigs]
        if len(palette) == n_classes:
            return colours
        n_classes = len(palette)


def isomorphic(a: TreeAutomaton, b: TreeAutomaton) -> dict[int, int] | None:
    """A state bijection ``a -> b`` preserving finals and transitions, or ``None``.

    Exhaustive backtracking, pruned by colour refinement.  Symbols are
    compared verbatim.
    """
    if (
        a.n_states != b.n_states
        or a.n_transitions != b.n_transitions
        or len(a.finals) != len(b.finals)
        or Counter(s for _, s, _ in a.transitions) != Counter(s for _, s, _ in b.transitions)
    ):
        return None
    ca, cb = _refine_colours([a, b])
    if Counter(ca) != Counter(cb):
        return None

    candidates = {q: [r for r in range(b.n_states) if cb[r] == ca[q]] for q in range(a.n_states)}
    order = sorted(range(a.n_states), key=lambda q: (len(candidates[q]), q))
    involving: dict[int, list[Transition]] = defaultdict(list)
    for t in a.transitions:
        for q in {t[0], *t[2]}:
            involving[q].append(t)
    target = b.transitions
    phi: dict[int, int] = {}
    used: set[int] = set()

    def consistent(q: int) -> bool:
        for t, s, src in involving[q]:
            if t in phi and all(x in phi for x in src):
                if (phi[t], s, tuple(phi[x] for x in src)) not in target:
                    return False
        return True

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        q = order[i]
        for r in candidates[q]:
            if r in used:
                continue
            phi[q] = r
            used.add(r)
            if consistent(q) and extend(i + 1):
                return True
            del phi[q]
            used.discard(r)
        return False

    if not extend(0):
        return None
    # equal transition counts plus an injective image make the map onto
    return dict(sorted(phi.items()))


def is_isomorphism(a: TreeAutomaton, b: TreeAutomaton, phi: Mapping[int, int]) -> bool:
    """Whether the given state map is a bijection carrying ``a`` exactly onto ``b``."""
    if sorted(phi) != list(range(a.n_states)) or sorted(phi.values()) != list(range(b.n_states)):
        return False
    if {phi[q] for q in a.finals} != set(b.finals):
        return False
    image = {(phi[q], s, tuple(phi[x] for x in src)) for q, s, src in a.transitions}
    return image == set(b.transitions)


# ---------------------------------------------------------------------------
# serialization


def to_json(a: TreeAutomaton) -> str:
    doc = {
        "states": [
            {"id": q, "label": a.labels[q], "final": q in a.finals} for q in range(a.n_states)
        ],
        "transitions": [
            {"target": q, "symbol": s, "sources": list(src)} for q, s, src in a.sorted_transitions()
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False)


def from_json(text: str, alphabet: Mapping[str, int] | None = None) -> TreeAutomaton:
    doc = json.loads(text)
    states = sorted(doc["states"], key=lambda s: s["id"])
    if [s["id"] for s in states] != list(range(len(states))):
        raise ValueError("state ids must be 0..n-1")
    transitions = {
        (t["target"], t["symbol"], tuple(t["sources"])) for t in doc["transitions"]
    }
    if alphabet is None:
        alphabet = {s: len(src) for _, s, src in transitions}
    return TreeAutomaton(
        [s["label"] for s in states],
        {s["id"] for s in states if s["final"]},
        transitions,
        alphabet,
    )


def _quote(s: str) -> str:
    return '"{}"'.format(s.replace("\\", "\\\\").replace('"', r"\""))


def to_dot(a: TreeAutomaton, name: str = "fta") -> str:
    """Graphviz text.  Rules of arity two or more go through a junction node."""
    lines = [f"digraph {_quote(name)} {{", "  rankdir=BT;"]
    for q in range(a.n_states):
        shape = "doublecircle" if q in a.finals else "circle"
        lines.append(f"  q{q} [shape={shape}, label={_quote(a.labels[q])}];")
    for i, (q, s, src) in enumerate(a.sorted_transitions()):
        if not src:
            lines.append(f"  c{i} [shape=none, label={_quote(s)}];")
            lines.append(f"  c{i} -> q{q};")
        elif len(src) == 1:
            lines.append(f"  q{src[0]} -> q{q} [label={_quote(s)}];")
        else:
            lines.append(f"  j{i} [shape=box, width=0.2, height=0.2, label={_quote(s)}];")
            for k, x in enumerate(src, start=1):
                lines.append(f"  q{x} -> j{i} [arrowhead=none, taillabel={k}];")
            lines.append(f"  j{i} -> q{q};")
    lines.append("}")
    return "\n".join(lines) + "\n"

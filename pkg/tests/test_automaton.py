import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeregex.automaton import (
    Partition,
    TreeAutomaton,
    accepts,
    from_json,
    is_isomorphism,
    is_similarity,
    isomorphic,
    quotient,
    run,
    run_all,
    to_dot,
    to_json,
)
from treeregex.construct import follow_automaton, k_position_automaton
from treeregex.terms import all_trees, parse_tree

from conftest import exprs

SIGMA = {"a": 0, "b": 0, "f": 1, "g": 2}


def small():
    # accepts f^n(a) for n >= 0 and g(x, b) for such x
    return TreeAutomaton(
        ["top", "chain", "b"],
        {0},
        {(1, "a", ()), (1, "f", (1,)), (0, "g", (1, 2)), (2, "b", ()), (0, "a", ()), (0, "f", (1,))},
        SIGMA,
    )


def permuted(a: TreeAutomaton, rng: random.Random) -> tuple[TreeAutomaton, dict]:
    perm = list(range(a.n_states))
    rng.shuffle(perm)
    inv = {old: new for new, old in enumerate(perm)}
    return (
        TreeAutomaton(
            [a.labels[old] for old in perm],
            {inv[q] for q in a.finals},
            {(inv[q], s, tuple(inv[x] for x in src)) for q, s, src in a.transitions},
            a.alphabet,
        ),
        inv,
    )


class TestRun:
    def test_accepts(self):
        a = small()
        assert accepts(a, parse_tree("f(f(a))"))
        assert accepts(a, parse_tree("g(f(a),b)"))
        assert not accepts(a, parse_tree("g(b,b)"))
        assert not accepts(a, parse_tree("b"))
        assert run(a, parse_tree("f(a)")) == {0, 1}

    def test_unknown_symbol(self):
        with pytest.raises(KeyError):
            run(small(), parse_tree("q(a)"))

    def test_wrong_arity(self):
        with pytest.raises(ValueError):
            run(small(), parse_tree("f(a,a)"))

    def test_run_all_matches_run(self):
        a = small()
        trees = all_trees(SIGMA, 6)
        masks = run_all(a, trees)
        for t in trees:
            assert masks[t] == sum(1 << q for q in run(a, t))

    def test_validation(self):
        with pytest.raises(ValueError):
            TreeAutomaton(["x"], {1}, set(), SIGMA)
        with pytest.raises(ValueError):
            TreeAutomaton(["x"], {0}, {(0, "f", ())}, SIGMA)
        with pytest.raises(ValueError):
            TreeAutomaton(["x"], {0}, {(0, "f", (3,))}, SIGMA)


class TestPartition:
    def test_canonical(self):
        p = Partition([[3, 1], [0], [2]])
        assert p.blocks == ((0,), (1, 3), (2,))
        assert p.block_of() == [0, 1, 2, 1]

    def test_invalid(self):
        with pytest.raises(ValueError):
            Partition([[0, 1], [1]])
        with pytest.raises(ValueError):
            Partition([[0], [2]])

    def test_join_refines(self):
        p = Partition.from_pairs(5, [(0, 1)])
        q = Partition.from_pairs(5, [(1, 2), (3, 4)])
        j = p.join(q)
        assert j.blocks == ((0, 1, 2), (3, 4))
        assert p.refines(j) and q.refines(j) and not j.refines(p)
        assert Partition.discrete(5).refines(p)

    def test_by_key(self):
        assert Partition.by_key(4, lambda i: i % 2).blocks == ((0, 2), (1, 3))


class TestQuotient:
    def test_merge(self):
        a = small()
        q = quotient(a, Partition([[0, 1], [2]]))
        assert q.n_states == 2
        assert q.finals == {0}
        assert (0, "g", (0, 1)) in q.transitions
        assert q.labels[0] == "{top, chain}"

    def test_discrete_is_identity(self):
        a = small()
        q = quotient(a, Partition.discrete(a.n_states))
        assert q.transitions == a.transitions

    def test_similarity(self):
        a = TreeAutomaton(
            ["p", "q", "r"], {0}, {(0, "a", ()), (1, "a", ()), (2, "b", ()), (0, "f", (2,)), (1, "f", (2,))}, SIGMA
        )
        assert is_similarity(a, Partition([[0, 1], [2]]))
        assert not is_similarity(a, Partition([[0, 2], [1]]))

    @settings(max_examples=40, deadline=None)
    @given(exprs(max_nodes=10))
    def test_similarity_quotient_preserves_language(self, sigma, e):
        from treeregex.relations import rel_follow
        from treeregex.construct import linear_form

        p = k_position_automaton(e, sigma)
        q = quotient(p, rel_follow(p, linear_form(e)))
        for t in all_trees(sigma, 5):
            assert accepts(p, t) == accepts(q, t)


class TestIsomorphism:
    def test_self(self):
        a = small()
        phi = isomorphic(a, a)
        assert phi is not None and is_isomorphism(a, a, phi)

    @settings(max_examples=60, deadline=None)
    @given(exprs(), st.integers(0, 2**32))
    def test_permutation_found(self, sigma, e, seed):
        a = k_position_automaton(e, sigma)
        b, inv = permuted(a, random.Random(seed))
        phi = isomorphic(a, b)
        assert phi is not None
        assert is_isomorphism(a, b, phi)
        assert is_isomorphism(a, b, inv)

    @settings(max_examples=60, deadline=None)
    @given(exprs(), st.integers(0, 2**32))
    def test_perturbation_detected(self, sigma, e, seed):
        a = follow_automaton(e, sigma)
        if a.n_transitions == 0:
            return
        rng = random.Random(seed)
        victim = sorted(a.transitions)[rng.randrange(a.n_transitions)]
        b = TreeAutomaton(a.labels, a.finals, a.transitions - {victim}, a.alphabet)
        assert isomorphic(a, b) is None

    def test_different_finals(self):
        a = small()
        b = TreeAutomaton(a.labels, {1}, a.transitions, a.alphabet)
        assert isomorphic(a, b) is None

    def test_symbol_swap_not_isomorphic(self):
        a = small()
        swapped = {(q, {"a": "b", "b": "a"}.get(s, s), src) for q, s, src in a.transitions}
        assert isomorphic(a, TreeAutomaton(a.labels, a.finals, swapped, a.alphabet)) is None

    def test_bad_mapping(self):
        a = small()
        assert not is_isomorphism(a, a, {0: 1, 1: 0, 2: 2})
        assert not is_isomorphism(a, a, {0: 0, 1: 1})


class TestSerialization:
    def test_json_round_trip(self, running, sigma):
        a = k_position_automaton(running, sigma)
        doc = json.loads(to_json(a))
        assert len(doc["states"]) == 7 and len(doc["transitions"]) == 23
        assert doc["states"][0] == {"id": 0, "label": "eps^1", "final": True}
        b = from_json(to_json(a), sigma)
        assert b.transitions == a.transitions and b.finals == a.finals and b.labels == a.labels

    def test_json_deterministic(self, running, sigma):
        assert to_json(k_position_automaton(running, sigma)) == to_json(k_position_automaton(running, sigma))

    def test_dot(self):
        text = to_dot(small(), "demo")
        assert text.startswith('digraph "demo"')
        assert "doublecircle" in text
        assert text.count("->") >= 6

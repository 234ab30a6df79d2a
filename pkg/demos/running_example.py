"""Walk through the four constructions on one expression.

Run with:  python3 demos/running_example.py
"""

from treeregex import (
    equation_automaton,
    follow_automaton,
    k_c_continuation_automaton,
    k_position_automaton,
    parse_expr,
    quotient,
    rel_e,
    v_merge,
)
from treeregex.generate import EXAMPLE_ALPHABET
from treeregex.posfun import first, follow
from treeregex.terms import linearize, to_text

TEXT = "(f(a)*[a] .[a] b + h(b))*[b] + g(c,a)*[c] .[c] (f(a)*[a] .[a] b + h(b))*[b]"

# %% The expression and its marked (linear) form
e = parse_expr(TEXT, EXAMPLE_ALPHABET)
bar = linearize(e)
print("expression :", to_text(e))
print("linearized :", to_text(bar))

# %% First and Follow: every state of every construction is built from these
print("\nFirst =", sorted(first(bar)))
for sym, k in [("f@1", 1), ("g@3", 1), ("g@3", 2)]:
    print(f"Follow({sym}, {k}) =", sorted(follow(bar, sym, k)))

# %% Four automata for the same language
p = k_position_automaton(e, EXAMPLE_ALPHABET)
f = follow_automaton(e, EXAMPLE_ALPHABET)
a = equation_automaton(e, EXAMPLE_ALPHABET)
c = k_c_continuation_automaton(e, EXAMPLE_ALPHABET)
for name, x in [("position", p), ("follow", f), ("equation", a), ("continuation", c)]:
    print(f"{name:>13}: {x.n_states} states, {x.n_transitions} transitions")

# %% Each continuation state carries the expression still to be read
print("\ncontinuation states:")
for label in c.labels:
    print("  ", label)

# %% Unmarking the continuations recovers the equation automaton
ce = quotient(c, rel_e(c))
print(f"\nC / ~e: {ce.n_states} states, {ce.n_transitions} transitions")

# %% Merging both ways at once is never larger than either
vm = v_merge(e, EXAMPLE_ALPHABET)
print(f"first stage: {vm.stage1.n_states} states; joined: {vm.automaton.n_states} states")
for label in vm.automaton.labels:
    print("  ", label)

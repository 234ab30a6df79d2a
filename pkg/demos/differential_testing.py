"""Random expressions, every claim checked, failures shrunk.

Run with:  python3 demos/differential_testing.py [count]
"""

import sys

from treeregex.construct import k_c_continuation_automaton
from treeregex.generate import EXAMPLE_ALPHABET, GeneratorConfig, generate_many, shrink
from treeregex.terms import ZERO, all_trees, parse_expr, to_text
from treeregex.verify import verify_expression

count = int(sys.argv[1]) if len(sys.argv) > 1 else 200
consts = sorted(EXAMPLE_ALPHABET.constants)
trees = all_trees(EXAMPLE_ALPHABET, 6)

# %% Batch: build all constructions and compare them on every tree of <= 6 nodes
failing = []
for e in generate_many(GeneratorConfig(seed=2024), count):
    bad = [c.name for c in verify_expression(e, EXAMPLE_ALPHABET, depth=6, trees=trees) if not c.passed]
    if bad:
        failing.append((e, bad))
print(f"{count - len(failing)}/{count} expressions passed every claim")


# %% Shrink each failure to a minimal witness for the same claims
def fails_same(names):
    def check(x):
        got = {c.name for c in verify_expression(x, EXAMPLE_ALPHABET, depth=4) if not c.passed}
        return set(names) <= got

    return check


for e, names in failing[:3]:
    small = shrink(e, fails_same(names), consts)
    print(f"\n{to_text(e)}\n  fails {names}\n  shrinks to {to_text(small)}")

# %% The usual witness: a position behind a product whose left side never yields its constant
w = parse_expr("b .[a] h(c)", EXAMPLE_ALPHABET)
c = k_c_continuation_automaton(w, EXAMPLE_ALPHABET)
print("\n" + to_text(w))
for key, label in zip(c.keys, c.labels):
    print("  ", label, "(dead)" if key.continuation == ZERO else "")

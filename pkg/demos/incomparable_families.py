"""Two families where the follow and equation automata trade places.

Run with:  python3 demos/incomparable_families.py
"""

from treeregex import equation_automaton, follow_automaton, parse_alphabet, parse_expr, v_merge_automaton

sum_alphabet = parse_alphabet("a:0 f:1")

print(f"{'n':>3} | {'chain: F':>8} {'A':>4} {'V':>4} | {'sum: F':>6} {'A':>4} {'V':>4}")
for n in (1, 2, 3, 5, 8, 13):
    # a closure over a product of n distinct closures: every position follows every other
    chain_alphabet = parse_alphabet("a:0 " + " ".join(f"f{i}:1" for i in range(1, n + 1)))
    chain = parse_expr("(" + " .[a] ".join(f"f{i}(a)*[a]" for i in range(1, n + 1)) + ")*[a]", chain_alphabet)
    # n copies of the same closure: the derived terms collapse, the positions do not
    summed = parse_expr(" + ".join(["f(a)*[a]"] * n), sum_alphabet)
    row = [
        follow_automaton(chain).n_states,
        equation_automaton(chain).n_states,
        v_merge_automaton(chain).n_states,
        follow_automaton(summed, sum_alphabet).n_states,
        equation_automaton(summed, sum_alphabet).n_states,
        v_merge_automaton(summed, sum_alphabet).n_states,
    ]
    print(f"{n:>3} | {row[0]:>8} {row[1]:>4} {row[2]:>4} | {row[3]:>6} {row[4]:>4} {row[5]:>4}")

# n = 1 of the sum family is the single closure f(a)*[a]; its follow automaton has one state

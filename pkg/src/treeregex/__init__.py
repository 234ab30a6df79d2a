"""Tree automata from regular tree expressions.

Four constructions (position, follow, equation and continuation automata),
the state equivalences relating them, and a merged automaton no larger than
the follow and equation automata.
"""

from .automaton import (
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
from .construct import (
    EPS,
    ContinuationState,
    InvariantViolation,
    Position,
    WatchdogError,
    c_continuation,
    equation_automaton,
    f_inverse,
    follow_automaton,
    k_c_continuation_automaton,
    k_position_automaton,
    partial_derivative,
)
from .generate import GeneratorConfig, generate_expr, generate_many, shrink
from .posfun import EPSILON, NonLinearError, first, follow, last
from .relations import is_maximal_similarity, rel_combined, rel_e, rel_follow, v_merge, v_merge_automaton
from .terms import (
    ParseError,
    RankedAlphabet,
    Tree,
    all_trees,
    contains_constant,
    enumerate_language,
    linearize,
    parse_alphabet,
    parse_expr,
    parse_tree,
    to_text,
    unmark,
)
from .verify import build_all, verify_expression

__version__ = "0.1.0"

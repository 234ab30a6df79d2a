import pytest
from hypothesis import strategies as st

from treeregex.generate import EXAMPLE_ALPHABET, GeneratorConfig, generate_expr
from treeregex.terms import linearize, parse_alphabet, parse_expr

RUNNING = "(f(a)*[a] .[a] b + h(b))*[b] + g(c,a)*[c] .[c] (f(a)*[a] .[a] b + h(b))*[b]"
FAMILY_ALPHABET = parse_alphabet("a:0 f:1")


def chain_family(n: int) -> str:
    """((f1(a)*[a] .[a] f2(a)*[a]) ... .[a] fn(a)*[a])*[a]"""
    body = " .[a] ".join(f"f{i}(a)*[a]" for i in range(1, n + 1))
    return f"({body})*[a]"


def chain_alphabet(n: int):
    return parse_alphabet("a:0 " + " ".join(f"f{i}:1" for i in range(1, n + 1)))


def sum_family(n: int) -> str:
    return " + ".join(["f(a)*[a]"] * n)


@pytest.fixture(scope="session")
def sigma():
    return EXAMPLE_ALPHABET


@pytest.fixture(scope="session")
def running():
    return parse_expr(RUNNING, EXAMPLE_ALPHABET)


@pytest.fixture(scope="session")
def running_bar(running):
    return linearize(running)


def exprs(max_nodes: int = 12, alphabet=EXAMPLE_ALPHABET):
    """Hypothesis strategy drawing generator seeds, so failures replay by seed."""
    return st.integers(min_value=0, max_value=2**63 - 1).map(
        lambda s: generate_expr(GeneratorConfig(max_ast_nodes=max_nodes, alphabet=alphabet, seed=s))
    )


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for n in sorted(REPORT):
            terminalreporter.write_line(REPORT[n])

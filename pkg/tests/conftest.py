from functools import lru_cache
from pathlib import Path

import pytest

from meloid.core import load_theory
from meloid.prover import prove_theory
from meloid.strategy.search import SearchBudget

CORPUS = Path(__file__).resolve().parent.parent / "src" / "meloid" / "corpus"
THEORIES = ("Nat", "Lists", "Trees")


@lru_cache(maxsize=None)
def theory(name: str):
    return load_theory(CORPUS / f"{name}.thy")


@lru_cache(maxsize=None)
def proved_theory(name: str):
    """The theory with every lemma its own strategy proves marked as proved."""
    ctx = theory(name)
    for r in prove_theory(ctx, SearchBudget(time_limit=None)):
        if r.proved:
            ctx = ctx.with_lemma_status(r.lemma, True)
    return ctx


def context_before(name: str, lemma: str):
    return proved_theory(name).before(lemma)


@pytest.fixture
def lists():
    return theory("Lists")


@pytest.fixture
def nat():
    return theory("Nat")


@pytest.fixture
def trees():
    return theory("Trees")


@lru_cache(maxsize=None)
def mined():
    """The bundled-corpus dataset, mined once per session."""
    from meloid.learn import active_mine

    return tuple(active_mine([theory(n) for n in THEORIES]))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)

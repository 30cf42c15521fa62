import pytest

from meloid.core import App, ElaborationError, Var, elaborate, free_vars, parse_theory

from conftest import CORPUS, theory

PRELUDE = """
datatype nat = Zero | Suc nat
datatype list = Nil | Cons nat list
"""


def ctx_of(text: str):
    return elaborate(parse_theory(PRELUDE + text), "T")


def test_app_recurses_on_first_argument(lists):
    assert lists.functions["app"].recursion_positions == frozenset({1})


def test_itrev_second_argument_is_an_accumulator(lists):
    assert lists.functions["itrev"].recursion_positions == frozenset({1})


def test_recursion_positions_of_nat_functions(nat):
    assert nat.functions["plus"].recursion_positions == frozenset({1})
    assert nat.functions["minus"].recursion_positions == frozenset({1, 2})
    # not recursive: the positions it pattern-matches on
    assert nat.functions["not"].recursion_positions == frozenset({1})


def test_non_structural_recursion_is_rejected():
    with pytest.raises(ElaborationError, match="non-structural"):
        ctx_of(
            """
            fun g :: nat -> nat where
                g x = Suc x
            fun f :: nat -> nat -> nat where
                f x Zero = x
              | f x (Suc y) = f x (g x)
            """
        )


def test_recursion_must_shrink_an_argument():
    with pytest.raises(ElaborationError, match="non-structural"):
        ctx_of(
            """
            fun g :: nat -> nat where
                g x = Suc x
            fun f :: nat -> nat where
                f x = f (g x)
            """
        )


@pytest.mark.parametrize(
    "body, message",
    [
        ("fun f :: nat -> nat where\n f x = h x", "unknown symbol"),
        ("fun f :: nat -> nat where\n f x = Suc x x", "arity"),
        ("fun f :: nat -> nat where\n f x = Nil", "sort"),
        ("fun f :: nat -> nat where\n f Zero = Zero\n | f x = x", "overlap"),
        ("fun f :: nat -> nat -> nat where\n f x x = x", "repeated|linear"),
        ("fun f :: nat -> nat where\n f x = y", "unbound|variable"),
        ('lemma l: "x = y"', "ambiguous"),
        ("fun f :: nat -> foo where\n f x = x", "unknown sort"),
        ("datatype loop = Loop loop", "non-recursive"),
        ("lemma l: \"Zero = Zero\" by Nope", "unknown strategy"),
        ("datatype nat = A", "duplicate"),
    ],
)
def test_elaboration_errors(body, message):
    with pytest.raises(ElaborationError, match=message):
        ctx_of(body)


def test_error_carries_line():
    with pytest.raises(ElaborationError) as info:
        ctx_of("\n\nfun f :: nat -> nat where\n f x = h x")
    assert info.value.line > 0


def test_lemmas_start_unproved(lists):
    assert lists.lemmas and not any(l.proved for l in lists.lemmas)


def test_elaboration_is_deterministic():
    text = (CORPUS / "Lists.thy").read_text()
    assert elaborate(parse_theory(text), "Lists") == elaborate(parse_theory(text), "Lists")


def test_variable_sorts_are_inferred(lists):
    goal = lists.lemma("itrev_nil").goal
    (xs,) = goal.fixed_vars
    assert xs == Var("xs", "list")
    assert free_vars(goal) == {xs}


def test_free_vars_examples(lists):
    assert free_vars(lists.term("app xs ys")) == {Var("xs", "list"), Var("ys", "list")}
    assert free_vars(lists.term("Zero")) == frozenset()


def test_schematic_variables_rejected_in_files():
    with pytest.raises(Exception):
        ctx_of('lemma l: "?x = Zero"')


def test_corpus_is_large_enough():
    total = sum(len(theory(n).lemmas) for n in ("Nat", "Lists", "Trees"))
    assert total >= 40

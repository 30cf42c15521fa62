from itertools import product

import pytest
from hypothesis import given, settings

from meloid.core import App, Equation, Var, elaborate, parse_theory
from meloid.core.terms import subterms
from meloid.rewrite import (
    HYPOTHESIS_CAP,
    Rejected,
    ReplayError,
    RuleOrigin,
    SimpSet,
    Step,
    apply_step,
    context_simpset,
    definition_rules,
    definitional_simpset,
    eval_ground,
    hypothesis_rule,
    is_constructor_term,
    normalize,
    orient_equation,
    parse_step,
    replay_steps,
    rule_table,
)
from meloid.core.terms import _match
from meloid.tactics.counterexample import GroundTerms

from conftest import proved_theory, theory
from term_strategies import constructor_terms, ground_terms, terms

LISTS = theory("Lists")
NAT = theory("Nat")


def E(ctx, text):
    return ctx.equation(text)


def test_orient_size_decrease():
    rule = orient_equation(LISTS, E(LISTS, "app xs Nil = xs"), "app_nil")
    assert rule.lhs == LISTS.term("app xs Nil") and rule.rhs == Var("xs", "list")
    assert str(rule.origin) == "lemma:app_nil:lr"


def test_orient_rejects_commutativity():
    with pytest.raises(Rejected):
        orient_equation(NAT, E(NAT, "plus x y = plus y x"))


def test_orient_associativity_by_left_load():
    rule = orient_equation(LISTS, E(LISTS, "app (app xs ys) zs = app xs (app ys zs)"))
    assert not rule.origin.reversed
    assert rule.lhs == LISTS.term("app (app xs ys) zs")


def test_orient_right_to_left():
    rule = orient_equation(LISTS, E(LISTS, "length (app xs ys) = plus (length xs) (length ys)"), "length_app")
    assert rule.origin.reversed
    assert rule.lhs == LISTS.term("plus (length xs) (length ys)")


def test_orient_rejects_variable_lhs_and_extra_vars():
    with pytest.raises(Rejected):
        orient_equation(LISTS, Equation(Var("xs", "list"), Var("ys", "list")))
    with pytest.raises(Rejected):
        orient_equation(LISTS, E(LISTS, "app xs Nil = app ys Nil"))


def test_origin_round_trip():
    for text in ["def:app:2", "lemma:app_nil:lr", "lemma:rev_app:rl", "premise:1", "ih:3"]:
        assert str(RuleOrigin.parse(text)) == text


def test_normalize_app_two_steps():
    r = normalize(definitional_simpset(LISTS), LISTS.term("app (Cons Zero Nil) Nil"))
    assert r.term == LISTS.term("Cons Zero Nil")
    assert len(r.trace) == 2 and not r.exhausted
    assert str(r.trace[0]) == "def:app:2 @ root with {x=Zero,xs=Nil,ys=Nil}"
    assert str(r.trace[1]) == "def:app:1 @ 2 with {ys=Nil}"


def test_normalize_variable_is_normal():
    r = normalize(definitional_simpset(LISTS), Var("xs", "list"))
    assert r.term == Var("xs", "list") and r.trace == ()


def test_normalize_rev_matches_ground_evaluation():
    t = LISTS.term("rev (Cons Zero (Cons (Suc Zero) Nil))")
    r = normalize(definitional_simpset(LISTS), t)
    assert r.term == LISTS.term("Cons (Suc Zero) (Cons Zero Nil)")
    assert eval_ground(LISTS, t) == r.term


def test_budget_exhaustion_is_flagged():
    t = LISTS.term("rev (Cons Zero (Cons (Suc Zero) Nil))")
    r = normalize(definitional_simpset(LISTS), t, budget=3)
    assert r.exhausted and len(r.trace) == 3
    assert replay_steps(rule_table(definition_rules(LISTS)), t, r.trace) == r.term


def test_hypothesis_rules_are_capped():
    xs = Var("xs", "list")
    # a growing premise: xs -> Cons Zero xs fires only up to the cap
    eq = Equation(LISTS.term("rev xs"), LISTS.term("Cons Zero (rev xs)"))
    rule = hypothesis_rule(eq, "premise", 1)
    ss = definitional_simpset(LISTS).extended([rule])
    r = normalize(ss, LISTS.term("rev xs"), budget=1000)
    assert not r.exhausted
    assert len(r.trace) == HYPOTHESIS_CAP


def test_hypothesis_rule_rejections():
    q = Var("?ys", "list")
    assert hypothesis_rule(Equation(q, LISTS.term("Nil")), "ih", 1) is None
    assert hypothesis_rule(Equation(LISTS.term("Nil"), q), "ih", 1) is None
    assert hypothesis_rule(Equation(LISTS.term("Nil"), LISTS.term("Nil")), "ih", 1) is None


def test_simpset_dedupes_and_orders():
    rules = definition_rules(LISTS)
    ss = SimpSet(rules + rules)
    assert len(ss) == len(rules)
    assert [r.origin for r in ss] == [r.origin for r in rules]


def test_context_simpset_puts_lemmas_after_definitions():
    ctx = proved_theory("Lists").before("itrev_nil")
    origins = [r.origin.kind for r in context_simpset(ctx)]
    assert origins == sorted(origins, key=lambda k: k != "def")
    names = [r.origin.name for r in context_simpset(ctx) if r.origin.kind == "lemma"]
    assert names[:2] == ["plus_zero", "plus_assoc"]
    assert "itrev_nil" not in names


def test_eval_ground_examples():
    assert eval_ground(NAT, NAT.term("plus (Suc Zero) (Suc Zero)")) == NAT.term("Suc (Suc Zero)")
    assert eval_ground(NAT, NAT.term("Zero")) == NAT.term("Zero")


def test_eval_ground_stuck_on_partial_function():
    ctx = elaborate(
        parse_theory(
            """
            datatype nat = Zero | Suc nat
            datatype list = Nil | Cons nat list
            fun hd :: list -> nat where
                hd (Cons x xs) = x
            """
        )
    )
    assert eval_ground(ctx, ctx.term("hd Nil")) is None
    assert eval_ground(ctx, ctx.term("hd (Cons Zero Nil)")) == ctx.term("Zero")


def test_eval_ground_budget():
    t = NAT.term("mult (Suc (Suc (Suc Zero))) (Suc (Suc Zero))")
    assert eval_ground(NAT, t, budget=2) is None
    assert eval_ground(NAT, t) is not None


def test_trace_line_round_trip():
    ctx = LISTS
    t = ctx.term("app (Cons Zero Nil) Nil")
    r = normalize(definitional_simpset(ctx), t)
    sorts = {"x": "nat", "xs": "list", "ys": "list"}
    for step in r.trace:
        back = parse_step(str(step), lambda text, s: ctx.term(text, sorts, s), sorts)
        assert back == step


def test_apply_step_rejects_corruption():
    ctx = LISTS
    table = rule_table(definition_rules(ctx))
    t = ctx.term("app (Cons Zero Nil) Nil")
    r = normalize(definitional_simpset(ctx), t)
    bad = Step(r.trace[0].origin, r.trace[0].position, ((Var("x", "nat"), ctx.term("Suc Zero")),) + r.trace[0].subst[1:])
    with pytest.raises(ReplayError):
        apply_step(table, t, bad)
    with pytest.raises(ReplayError):
        apply_step(table, t, Step(r.trace[0].origin, (7,), r.trace[0].subst))
    with pytest.raises(ReplayError):
        apply_step(table, t, Step(RuleOrigin("lemma", "nope", 0), (), ()))


LIST_TERMS = terms(LISTS, "list", 3)
GROUND_LISTS = ground_terms(LISTS, "list", 3)
SIMP = definitional_simpset(LISTS)
TABLE = rule_table(definition_rules(LISTS))


@settings(max_examples=150, deadline=None)
@given(LIST_TERMS)
def test_normalize_is_idempotent(t):
    r = normalize(SIMP, t)
    if not r.exhausted:
        again = normalize(SIMP, r.term)
        assert again.term == r.term and again.trace == ()


@settings(max_examples=150, deadline=None)
@given(LIST_TERMS)
def test_no_redex_remains(t):
    r = normalize(SIMP, t)
    if not r.exhausted:
        for _, sub in subterms(r.term):
            for rule in SIMP.candidates(sub):
                assert not _match(rule.lhs, sub, rule.instantiable, {})


@settings(max_examples=150, deadline=None)
@given(LIST_TERMS)
def test_trace_replays_exactly(t):
    r = normalize(SIMP, t)
    assert replay_steps(TABLE, t, r.trace) == r.term


@settings(max_examples=150, deadline=None)
@given(GROUND_LISTS)
def test_leftmost_and_rightmost_agree_on_ground_terms(t):
    left = normalize(SIMP, t, 100_000)
    right = normalize(SIMP, t, 100_000, rightmost=True)
    assert left.term == right.term
    assert eval_ground(LISTS, t) == left.term
    assert is_constructor_term(LISTS, left.term)


@settings(max_examples=100, deadline=None)
@given(constructor_terms(LISTS, "list", 4))
def test_constructor_terms_evaluate_to_themselves(t):
    assert eval_ground(LISTS, t) == t


@pytest.mark.parametrize("name", ["Nat", "Trees"])
def test_ground_confluence_other_theories(name):
    ctx = theory(name)
    ss = definitional_simpset(ctx)
    gen = GroundTerms(ctx)
    for f in ctx.functions.values():
        pools = [gen.up_to(s, 3)[:6] for s in f.arg_sorts]
        for args in product(*pools):
            t = App(f.name, tuple(args), f.result_sort)
            assert normalize(ss, t, 100_000).term == normalize(ss, t, 100_000, rightmost=True).term

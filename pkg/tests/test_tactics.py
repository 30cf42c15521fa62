from itertools import product

import pytest

from meloid.core import App, Equation, SequentGoal, Var
from meloid.core.terms import goal_vars
from meloid.rewrite import Step, eval_ground
from meloid.tactics import (
    AutoStep,
    ContractViolation,
    InductArgs,
    InductStep,
    ProofState,
    TacticFailure,
    apply_induct,
    enumerate_induct_args,
    find_counterexample,
    format_trace,
    induct_goal,
    parse_trace,
    replay_trace,
    tac_auto,
    tac_fastforce,
    tac_is_solved,
)
from meloid.tactics.counterexample import GroundTerms

from conftest import context_before, proved_theory, theory

LISTS = theory("Lists")
NAT = theory("Nat")


def G(ctx, text):
    return ctx.goal(text)


def names(args_list):
    return [(a.variable, set(a.arbitrary)) for a in args_list]


def test_enumerate_two_vars():
    got = enumerate_induct_args(G(LISTS, "app xs ys = app ys xs"), max_arbitrary=1)
    assert names(got) == [("xs", set()), ("xs", {"ys"}), ("ys", set()), ("ys", {"xs"})]


def test_enumerate_ground_goal():
    assert enumerate_induct_args(G(NAT, "plus Zero Zero = Zero")) == []


def test_enumerate_single_var():
    assert names(enumerate_induct_args(G(LISTS, "itrev xs Nil = rev xs"))) == [("xs", set())]


def test_enumerate_three_vars_subsets_by_size():
    got = enumerate_induct_args(G(LISTS, "app (app xs ys) zs = app xs (app ys zs)"))
    assert [str(a) for a in got[:4]] == [
        "induct xs",
        "induct xs arbitrary: ys",
        "induct xs arbitrary: zs",
        "induct xs arbitrary: ys zs",
    ]
    assert len(got) == 12


def test_induct_on_list_shapes():
    goal = G(LISTS, "app xs Nil = xs")
    base, step = induct_goal(LISTS, goal, InductArgs("xs"))
    assert str(base.conclusion) == "app Nil Nil = Nil"
    assert not base.premises
    assert str(step.conclusion) == "app (Cons a xs) Nil = Cons a xs"
    assert [str(p) for p in step.hypotheses] == ["app xs Nil = xs"]


def test_induct_with_arbitrary_makes_ih_schematic():
    goal = G(LISTS, "itrev v1 v2 = app (rev v1) v2")
    _, step = induct_goal(LISTS, goal, InductArgs("v1", ("v2",)))
    (ih,) = step.hypotheses
    assert str(ih) == "itrev v1 ?v2 = app (rev v1) ?v2"
    assert step.fixed_vars == (Var("a", "nat"), Var("v1", "list"), Var("v2", "list"))


def test_induct_tree_has_two_hypotheses():
    ctx = theory("Trees")
    _, step = induct_goal(ctx, G(ctx, "mirror (mirror t) = t"), InductArgs("t"))
    assert str(step.conclusion) == "mirror (mirror (Node t a t1)) = Node t a t1"
    assert [str(h) for h in step.hypotheses] == ["mirror (mirror t) = t", "mirror (mirror t1) = t1"]


def test_induct_carries_premises_without_ih_when_they_mention_the_variable():
    goal = G(LISTS, "app xs ys = Nil ==> xs = Nil")
    subgoals = induct_goal(LISTS, goal, InductArgs("xs"))
    assert all(len(g.premises) == 1 and not g.ih_indices for g in subgoals)


def test_induct_keeps_unrelated_premises_and_adds_ih():
    goal = G(LISTS, "rev ys = Nil ==> app xs Nil = xs")
    _, step = induct_goal(LISTS, goal, InductArgs("xs"))
    assert str(step.premises[0]) == "rev ys = Nil"
    assert len(step.hypotheses) == 1


@pytest.mark.parametrize(
    "args", [InductArgs("zz"), InductArgs("xs", ("xs",)), InductArgs("xs", ("nope",)), InductArgs("xs", ("ys", "ys"))]
)
def test_induct_contract_violations(args):
    with pytest.raises(ContractViolation):
        induct_goal(LISTS, G(LISTS, "app xs ys = app ys xs"), args)


def test_auto_closes_app_nil_nil():
    state = tac_auto(ProofState.initial(LISTS, G(LISTS, "app Nil Nil = Nil")))
    assert state.solved


def test_auto_on_empty_state_is_identity():
    state = ProofState(LISTS, ())
    assert tac_auto(state) is state


def test_auto_closes_itrev_step_case():
    ctx = context_before("Lists", "itrev_nil")
    goal = G(ctx, "itrev v1 v2 = app (rev v1) v2")
    state = apply_induct(ProofState.initial(ctx, goal), InductArgs("v1", ("v2",)))
    step_only = ProofState(ctx, state.goals[1:])
    done = tac_auto(step_only)
    assert done.solved
    (rec,) = done.trace[0].goals
    assert [str(s.origin) for s in rec.lhs_steps] == ["def:itrev:2", "ih:1"]
    assert [str(s.origin) for s in rec.rhs_steps] == [
        "def:rev:2",
        "lemma:app_assoc:lr",
        "def:app:2",
        "def:app:1",
    ]


def test_auto_keeps_open_goals_simplified():
    state = tac_auto(ProofState.initial(LISTS, G(LISTS, "app (Cons Zero xs) ys = app ys xs")))
    (g,) = state.goals
    assert str(g.conclusion) == "Cons Zero (app xs ys) = app ys xs"


def test_auto_closes_contradictory_premise():
    state = tac_auto(ProofState.initial(LISTS, G(LISTS, "app Nil Nil = Cons Zero Nil ==> rev xs = ys")))
    assert state.solved
    assert state.trace[0].goals[0].closed == "contradiction"


def test_auto_never_increases_goal_count():
    ctx = context_before("Lists", "rev_rev")
    goal = G(ctx, "rev (rev xs) = xs")
    for args in enumerate_induct_args(goal):
        state = apply_induct(ProofState.initial(ctx, goal), args)
        assert len(tac_auto(state).goals) <= len(state.goals)


def test_fastforce_with_conjecture_premise():
    ctx = context_before("Lists", "itrev_nil")
    goal = G(ctx, "itrev ?xs ?ys = app (rev ?xs) ?ys ==> itrev xs Nil = rev xs")
    state = tac_fastforce(ProofState.initial(ctx, goal))
    assert state.solved


def test_fastforce_fails_on_commutativity():
    with pytest.raises(TacticFailure):
        tac_fastforce(ProofState.initial(LISTS, G(LISTS, "app xs ys = app ys xs")))


def test_fastforce_contract():
    with pytest.raises(ContractViolation):
        tac_fastforce(ProofState(LISTS, ()))


def test_fastforce_only_touches_first_goal():
    goals = (G(LISTS, "app Nil Nil = Nil"), G(LISTS, "app Nil xs = xs"))
    state = tac_fastforce(ProofState(LISTS, goals))
    assert state.goals == goals[1:]


def test_is_solved():
    assert tac_is_solved(ProofState(LISTS, ())).solved
    with pytest.raises(TacticFailure):
        tac_is_solved(ProofState(LISTS, (G(LISTS, "app Nil Nil = Nil"),)))


def _oracle_counterexample_exists(ctx, goal, bound=5):
    """Exhaustive search over all assignments up to ``bound``, with plain eval_ground."""
    gen = GroundTerms(ctx)
    variables = list(goal.fixed_vars)
    pools = [gen.up_to(v.sort, bound) for v in variables]
    for values in product(*pools):
        subst = dict(zip(variables, values))
        from meloid.core import apply_subst

        lhs = eval_ground(ctx, apply_subst(subst, goal.conclusion.lhs))
        rhs = eval_ground(ctx, apply_subst(subst, goal.conclusion.rhs))
        if lhs is not None and rhs is not None and lhs != rhs:
            return True
    return False


def test_counterexample_for_commutativity_is_first_in_order():
    cex = find_counterexample(LISTS, G(LISTS, "app xs ys = app ys xs"))
    assert {v.name: str(t) for v, t in cex.assignment} == {"xs": "Cons Zero Nil", "ys": "Cons (Suc Zero) Nil"}


def test_no_counterexample_for_app_nil():
    goal = G(LISTS, "app xs Nil = xs")
    assert find_counterexample(LISTS, goal) is None
    assert not _oracle_counterexample_exists(LISTS, goal)


def test_itrev_counterexample_has_nonempty_accumulator():
    cex = find_counterexample(LISTS, G(LISTS, "itrev xs ys = rev xs"))
    a = {v.name: str(t) for v, t in cex.assignment}
    assert a == {"xs": "Nil", "ys": "Cons Zero Nil"}


def test_counterexample_respects_premises():
    # the premise forces xs = Nil, under which the conclusion holds
    goal = G(LISTS, "app xs xs = Nil ==> app xs ys = ys")
    assert find_counterexample(LISTS, goal) is None
    assert find_counterexample(LISTS, G(LISTS, "app xs xs = xs ==> app xs ys = ys")) is None
    assert find_counterexample(LISTS, G(LISTS, "length xs = Suc Zero ==> rev xs = Nil")) is not None


def test_counterexample_ground_goal():
    assert find_counterexample(NAT, G(NAT, "plus Zero Zero = Suc Zero")) is not None
    assert find_counterexample(NAT, G(NAT, "plus Zero Zero = Zero")) is None


def test_counterexample_cap_limits_search():
    assert find_counterexample(LISTS, G(LISTS, "rev xs = xs"), assignment_cap=2) is None


def _proved(name, lemma):
    from meloid.prover import prove_lemma

    return prove_lemma(context_before(name, lemma), lemma)


def test_replay_app_nil_ok():
    r = _proved("Lists", "app_nil")
    assert r.proved
    assert replay_trace(r.context, "app_nil", r.outcome.trace).ok


def test_replay_detects_corrupted_substitution():
    r = _proved("Lists", "app_nil")
    trace = list(r.outcome.trace)
    idx = next(i for i, rec in enumerate(trace) if isinstance(rec, AutoStep))
    auto = trace[idx]
    g = auto.goals[1]
    step = g.lhs_steps[0]
    bad_subst = tuple((v, App("Nil", (), "list") if v.sort == "list" else t) for v, t in step.subst)
    bad = Step(step.origin, step.position, bad_subst)
    from dataclasses import replace

    trace[idx] = AutoStep((auto.goals[0], replace(g, lhs_steps=(bad,) + g.lhs_steps[1:])))
    result = replay_trace(r.context, "app_nil", tuple(trace))
    assert not result.ok and result.step == idx + 1


def test_replay_empty_trace_is_mismatch():
    result = replay_trace(LISTS, "rev_rev", ())
    assert not result.ok and "remain" in result.reason


def test_replay_rejects_unavailable_lemma():
    # the itrev_nil proof uses app_nil, which is unavailable if app_nil is not proved
    r = _proved("Lists", "itrev_nil")
    assert replay_trace(r.context, "itrev_nil", r.outcome.trace).ok
    weaker = r.context.with_lemma_status("app_nil", False)
    assert not replay_trace(weaker, "itrev_nil", r.outcome.trace).ok


@pytest.mark.parametrize("lemma", ["app_nil", "rev_rev", "itrev_nil", "itrev_general"])
def test_trace_text_round_trip(lemma):
    r = _proved("Lists", lemma)
    text = format_trace(r.outcome.trace)
    back = parse_trace(r.context, lemma, text)
    assert back == r.outcome.trace
    assert replay_trace(r.context, lemma, back).ok


def test_tactics_are_deterministic():
    ctx = context_before("Lists", "rev_rev")
    goal = G(ctx, "rev (rev xs) = xs")
    a = tac_auto(apply_induct(ProofState.initial(ctx, goal), InductArgs("xs")))
    b = tac_auto(apply_induct(ProofState.initial(ctx, goal), InductArgs("xs")))
    assert a.goals == b.goals and a.trace == b.trace


def test_validity_preserved_for_true_lemmas():
    ctx = proved_theory("Lists")
    for lemma in ctx.lemmas[:8]:
        for args in enumerate_induct_args(lemma.goal):
            for sub in induct_goal(ctx, lemma.goal, args):
                assert find_counterexample(ctx, sub, 5, 2000) is None, (lemma.name, str(args))

"""The auto, fastforce and is_solved analogues."""

from __future__ import annotations

from typing import Optional

from meloid.core.terms import App, Equation, SequentGoal
from meloid.core.theory import TheoryContext
from meloid.rewrite import (
    TACTIC_BUDGET,
    SimpSet,
    context_simpset,
    hypothesis_rule,
    normalize,
)
from meloid.tactics.state import (
    AutoStep,
    ContractViolation,
    GoalSimplification,
    ProofState,
    TacticFailure,
)


def hypothesis_rules(goal: SequentGoal) -> list:
    rules = []
    for i, p in enumerate(goal.premises, 1):
        rule = hypothesis_rule(p, "ih" if goal.is_ih(i - 1) else "premise", i)
        if rule is not None:
            rules.append(rule)
    return rules


def goal_simpset(ctx: TheoryContext, goal: SequentGoal, base: Optional[SimpSet] = None) -> SimpSet:
    base = context_simpset(ctx) if base is None else base
    return base.extended(hypothesis_rules(goal))


def _distinct_constructors(ctx: TheoryContext, a, b) -> bool:
    return (
        type(a) is App
        and type(b) is App
        and a.symbol in ctx.constructors
        and b.symbol in ctx.constructors
        and a.symbol != b.symbol
    )


def simplify_goal(
    ctx: TheoryContext,
    goal: SequentGoal,
    index: int = 0,
    budget: int = TACTIC_BUDGET,
    base: Optional[SimpSet] = None,
    use_hypotheses: bool = True,
) -> tuple[GoalSimplification, SequentGoal]:
    """Normalize both conclusion sides; the record says whether the goal closed."""
    base = context_simpset(ctx) if base is None else base
    simpset = base.extended(hypothesis_rules(goal)) if use_hypotheses else base
    usage: dict = {}
    lhs = normalize(simpset, goal.conclusion.lhs, budget, usage)
    remaining = budget - len(lhs.trace)
    rhs = normalize(simpset, goal.conclusion.rhs, remaining, usage)
    remaining -= len(rhs.trace)
    new_goal = SequentGoal(goal.premises, Equation(lhs.term, rhs.term), goal.ih_indices)
    if lhs.term == rhs.term:
        return GoalSimplification(index, lhs.trace, rhs.trace, "equal"), new_goal
    for i, p in enumerate(goal.premises, 1):
        if remaining <= 0:
            break
        pl = normalize(base, p.lhs, remaining)
        pr = normalize(base, p.rhs, remaining - len(pl.trace))
        remaining -= len(pl.trace) + len(pr.trace)
        if _distinct_constructors(ctx, pl.term, pr.term):
            record = GoalSimplification(index, lhs.trace, rhs.trace, "contradiction", i, pl.trace, pr.trace)
            return record, new_goal
    return GoalSimplification(index, lhs.trace, rhs.trace), new_goal


def tac_auto(state: ProofState, budget: int = TACTIC_BUDGET) -> ProofState:
    if not state.goals:
        return state
    base = context_simpset(state.context)
    records, remaining = [], []
    for i, goal in enumerate(state.goals):
        record, new_goal = simplify_goal(state.context, goal, i, budget, base)
        records.append(record)
        if record.closed is None:
            remaining.append(new_goal)
    return state.advance(remaining, AutoStep(tuple(records)))


def tac_fastforce(state: ProofState, budget: int = TACTIC_BUDGET) -> ProofState:
    if not state.goals:
        raise ContractViolation("fastforce needs at least one goal")
    record, _ = simplify_goal(state.context, state.goals[0], 0, budget)
    if record.closed is None:
        raise TacticFailure("fastforce could not discharge the first goal")
    return state.advance(state.goals[1:], AutoStep((record,), fastforce=True))


def tac_is_solved(state: ProofState) -> ProofState:
    if state.goals:
        raise TacticFailure(f"{len(state.goals)} goal(s) remain")
    return state

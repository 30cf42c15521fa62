"""Structural induction with an induction variable and a set of generalized variables."""

from __future__ import annotations

from itertools import combinations

from meloid.core.terms import App, Equation, SequentGoal, Var, fresh_name, goal_vars, iter_vars, subst_equation
from meloid.core.theory import TheoryContext
from meloid.tactics.state import ContractViolation, InductArgs, InductStep, ProofState

MAX_ARBITRARY = 2


def enumerate_induct_args(goal: SequentGoal, max_arbitrary: int = MAX_ARBITRARY) -> list[InductArgs]:
    variables = [v.name for v in goal.fixed_vars]
    result = []
    for v in variables:
        others = [w for w in variables if w != v]
        for k in range(0, min(max_arbitrary, len(others)) + 1):
            for subset in combinations(others, k):
                result.append(InductArgs(v, subset))
    return result


def induct_goal(ctx: TheoryContext, goal: SequentGoal, args: InductArgs) -> list[SequentGoal]:
    """The subgoals of one induction step on ``goal``, one per constructor in declaration order."""
    fixed = {v.name: v for v in goal.fixed_vars}
    var = fixed.get(args.variable)
    if var is None:
        raise ContractViolation(f"{args.variable!r} is not a free variable of the goal")
    if args.variable in args.arbitrary:
        raise ContractViolation("induction variable listed as arbitrary")
    if len(set(args.arbitrary)) != len(args.arbitrary):
        raise ContractViolation("duplicate arbitrary variable")
    arbitrary = []
    for name in args.arbitrary:
        if name not in fixed:
            raise ContractViolation(f"arbitrary {name!r} is not a free variable of the goal")
        arbitrary.append(fixed[name])
    if var.sort not in ctx.datatypes:
        raise ContractViolation(f"sort {var.sort!r} is not a datatype")

    # an IH that ignores premises is only sound when they do not depend on the generalized variables
    generalized = {var, *arbitrary}
    ih_allowed = not any(v in generalized for p in goal.premises for side in (p.lhs, p.rhs) for v in iter_vars(side))
    schematic = {w: Var("?" + w.name, w.sort) for w in arbitrary}
    taken = {v.name for v in goal_vars(goal)} | set(ctx.constructors) | set(ctx.functions)

    subgoals = []
    for ctor in ctx.datatypes[var.sort].constructors:
        names = set(taken)
        fresh_args = []
        reused = False
        for sort in ctor.arg_sorts:
            if sort == var.sort and not reused:
                fresh_args.append(Var(var.name, sort))
                reused = True
            elif sort == var.sort:
                fresh_args.append(Var(fresh_name(var.name, names), sort))
            else:
                fresh_args.append(Var(fresh_name("a", names), sort))
        instance = {var: App(ctor.name, tuple(fresh_args), var.sort)}
        premises = [subst_equation(instance, p) for p in goal.premises]
        ih_indices = []
        if ih_allowed:
            for i in ctor.recursive_args:
                hyp = {var: fresh_args[i], **schematic}
                ih_indices.append(len(premises))
                premises.append(subst_equation(hyp, goal.conclusion))
        subgoals.append(
            SequentGoal(tuple(premises), subst_equation(instance, goal.conclusion), frozenset(ih_indices))
        )
    return subgoals


def apply_induct(state: ProofState, args: InductArgs) -> ProofState:
    goal = state.first_goal()
    subgoals = induct_goal(state.context, goal, args)
    return state.advance(tuple(subgoals) + state.goals[1:], InductStep(args))

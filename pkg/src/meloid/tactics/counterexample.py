"""Bounded exhaustive counterexample search over ground constructor terms."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice, product
from typing import Optional

from meloid.core.terms import App, Equation, SequentGoal, Term, Var, apply_subst, equation_vars, pretty_term
from meloid.core.theory import TheoryContext
from meloid.rewrite import GroundEvaluator, eval_ground, is_constructor_term

SIZE_BOUND = 7
ASSIGNMENT_CAP = 20_000


@dataclass(frozen=True)
class Counterexample:
    assignment: tuple[tuple[Var, Term], ...]
    falsified: tuple[Term, Term]

    def __str__(self) -> str:
        binds = ", ".join(f"{v.name}={pretty_term(t)}" for v, t in self.assignment)
        lhs, rhs = self.falsified
        return f"{binds or '(ground)'}: {pretty_term(lhs)} /= {pretty_term(rhs)}"

    def to_json(self) -> dict:
        return {
            "assignment": {v.name: pretty_term(t) for v, t in self.assignment},
            "lhs": pretty_term(self.falsified[0]),
            "rhs": pretty_term(self.falsified[1]),
        }


class GroundTerms:
    """Ground constructor terms of each sort, grouped by exact size."""

    def __init__(self, ctx: TheoryContext):
        self.ctx = ctx
        self._cache: dict[tuple[str, int], list[Term]] = {}

    def of_size(self, sort: str, n: int) -> list[Term]:
        key = (sort, n)
        if key not in self._cache:
            self._cache[key] = self._build(sort, n)
        return self._cache[key]

    def _build(self, sort: str, n: int) -> list[Term]:
        out: list[Term] = []
        if n < 1:
            return out
        for ctor in self.ctx.datatypes[sort].constructors:
            if not ctor.arg_sorts:
                if n == 1:
                    out.append(App(ctor.name, (), sort))
                continue
            for sizes in _compositions(n - 1, len(ctor.arg_sorts)):
                pools = [self.of_size(s, k) for s, k in zip(ctor.arg_sorts, sizes)]
                for args in product(*pools):
                    out.append(App(ctor.name, tuple(args), sort))
        return out

    def up_to(self, sort: str, bound: int) -> list[Term]:
        return [t for n in range(1, bound + 1) for t in self.of_size(sort, n)]


def _compositions(total: int, parts: int):
    """Ordered splits of ``total`` into ``parts`` positive sizes, lexicographically."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class CounterexampleSearch:
    """Reusable search state (ground-term pools and evaluation cache) for one context."""

    def __init__(self, ctx: TheoryContext, size_bound: int = SIZE_BOUND, assignment_cap: int = ASSIGNMENT_CAP):
        self.ctx = ctx
        self.size_bound = size_bound
        self.assignment_cap = assignment_cap
        self.terms = GroundTerms(ctx)
        self.evaluate = GroundEvaluator(ctx)

    def domain(self, sort: str) -> list[Term]:
        return self.terms.up_to(sort, self.size_bound)

    def _holds(self, eq: Equation, memo: dict) -> Optional[bool]:
        """Truth of an equation with only schematic variables left, by bounded enumeration."""
        cached = memo.get(eq)
        if cached is not None or eq in memo:
            return cached
        schematic = [v for v in equation_vars(eq)]
        result: Optional[bool] = True
        pools = [self.domain(v.sort) for v in schematic]
        for values in islice(product(*pools), self.assignment_cap):
            inst = dict(zip(schematic, values))
            lhs = self.evaluate(apply_subst(inst, eq.lhs))
            rhs = self.evaluate(apply_subst(inst, eq.rhs))
            if lhs is None or rhs is None:
                continue
            if lhs != rhs:
                result = False
                break
        memo[eq] = result
        return result

    def search(self, goal: SequentGoal) -> Optional[Counterexample]:
        variables = list(goal.fixed_vars)
        pools = [self.domain(v.sort) for v in variables]
        memo: dict = {}
        for values in islice(product(*pools), self.assignment_cap):
            subst = dict(zip(variables, values))
            if not all(self._holds(_instantiate(subst, p), memo) for p in goal.premises):
                continue
            lhs = self.evaluate(apply_subst(subst, goal.conclusion.lhs))
            if lhs is None:
                continue
            rhs = self.evaluate(apply_subst(subst, goal.conclusion.rhs))
            if rhs is None or lhs == rhs:
                continue
            cex = Counterexample(tuple(subst.items()), (lhs, rhs))
            _revalidate(self.ctx, goal, cex)
            return cex
        return None


def _instantiate(subst, eq: Equation) -> Equation:
    return Equation(apply_subst(subst, eq.lhs), apply_subst(subst, eq.rhs))


def _revalidate(ctx: TheoryContext, goal: SequentGoal, cex: Counterexample) -> None:
    """Independent re-check with a fresh evaluator; a failure here is a bug."""
    subst = dict(cex.assignment)
    lhs = eval_ground(ctx, apply_subst(subst, goal.conclusion.lhs))
    rhs = eval_ground(ctx, apply_subst(subst, goal.conclusion.rhs))
    if lhs is None or rhs is None or lhs == rhs or (lhs, rhs) != cex.falsified:
        raise AssertionError(f"counterexample failed re-validation: {cex}")
    if not (is_constructor_term(ctx, lhs) and is_constructor_term(ctx, rhs)):
        raise AssertionError(f"counterexample sides are not values: {cex}")
    for p in goal.premises:
        inst = _instantiate(subst, p)
        if not equation_vars(inst):
            pl, pr = eval_ground(ctx, inst.lhs), eval_ground(ctx, inst.rhs)
            if pl is None or pr is None or pl != pr:
                raise AssertionError(f"counterexample violates a premise: {cex}")


def find_counterexample(
    ctx: TheoryContext,
    goal: SequentGoal,
    size_bound: int = SIZE_BOUND,
    assignment_cap: int = ASSIGNMENT_CAP,
    search: Optional[CounterexampleSearch] = None,
) -> Optional[Counterexample]:
    if search is None:
        search = CounterexampleSearch(ctx, size_bound, assignment_cap)
    return search.search(goal)

"""Depth-first, chronologically backtracking interpreter for strategy expressions."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Optional, Sequence

from meloid.conjecture import MAX_CONJECTURES, generate_conjectures, insert_conjecture
from meloid.core.terms import pretty_goal
from meloid.core.theory import TheoryContext
from meloid.strategy.syntax import (
    BUILTIN_STRATEGIES,
    Atomic,
    DynamicInduct,
    Ors,
    Ref,
    Repeat,
    StrategyError,
    StrategyExpr,
    Thens,
)
from meloid.tactics.counterexample import ASSIGNMENT_CAP, SIZE_BOUND, Counterexample, CounterexampleSearch
from meloid.tactics.induction import MAX_ARBITRARY, apply_induct, enumerate_induct_args
from meloid.tactics.simp import tac_auto, tac_fastforce
from meloid.tactics.state import (
    ConjectureStep,
    ContractViolation,
    InductArgs,
    ProofState,
    QuickcheckStep,
    TacticFailure,
    TacticRecord,
)

InductOrdering = Callable[[ProofState, list[InductArgs]], list[InductArgs]]


@dataclass(frozen=True)
class SearchBudget:
    time_limit: Optional[float] = 30.0  # seconds; None means node-limited only
    node_limit: int = 5_000
    conjecture_limit: int = MAX_CONJECTURES

    def __post_init__(self):
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time limit must be positive")
        if self.node_limit <= 0 or self.conjecture_limit <= 0:
            raise ValueError("limits must be positive")


@dataclass
class SearchStats:
    nodes: int = 0
    pruned_fastforce: int = 0
    pruned_quickcheck: int = 0
    conjectures_tried: int = 0
    fastforce_passed: int = 0
    quickcheck_passed: int = 0
    counterexamples: list[tuple[str, Counterexample]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "nodes": self.nodes,
            "pruned_fastforce": self.pruned_fastforce,
            "pruned_quickcheck": self.pruned_quickcheck,
            "conjectures_tried": self.conjectures_tried,
            "fastforce_passed": self.fastforce_passed,
            "quickcheck_passed": self.quickcheck_passed,
        }


@dataclass(frozen=True)
class SearchOutcome:
    status: str  # "proved", "exhausted" or "timed_out"
    trace: tuple[TacticRecord, ...]
    stats: SearchStats

    @property
    def proved(self) -> bool:
        return self.status == "proved"

    @property
    def conjecture(self):
        for record in self.trace:
            if isinstance(record, ConjectureStep):
                return record.conjecture
        return None


class _OutOfBudget(Exception):
    pass


@dataclass(frozen=True)
class InductTactic:
    """One concrete variation of the induct method."""

    args: InductArgs

    def __call__(self, state: ProofState) -> ProofState:
        return apply_induct(state, self.args)


def expand_dynamic(
    state: ProofState,
    expr: DynamicInduct = DynamicInduct(),
    max_arbitrary: int = MAX_ARBITRARY,
    ordering: Optional[InductOrdering] = None,
) -> list[InductTactic]:
    if not state.goals:
        raise ContractViolation("Dynamic (Induct) needs at least one goal")
    variants = enumerate_induct_args(state.goals[0], max_arbitrary)
    if ordering is not None:
        variants = ordering(state, variants)
    return [InductTactic(a) for a in variants]


class Searcher:
    def __init__(
        self,
        strategies: Mapping[str, StrategyExpr],
        budget: SearchBudget,
        max_arbitrary: int = MAX_ARBITRARY,
        induct_ordering: Optional[InductOrdering] = None,
        size_bound: int = SIZE_BOUND,
        assignment_cap: int = ASSIGNMENT_CAP,
    ):
        self.strategies = strategies
        self.budget = budget
        self.max_arbitrary = max_arbitrary
        self.induct_ordering = induct_ordering
        self.size_bound = size_bound
        self.assignment_cap = assignment_cap
        self.stats = SearchStats()
        self._deadline: Optional[float] = None
        self._quickcheck: dict[int, CounterexampleSearch] = {}

    def tick(self) -> None:
        self.stats.nodes += 1
        if self.stats.nodes > self.budget.node_limit:
            raise _OutOfBudget()
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise _OutOfBudget()

    def run(self, expr: StrategyExpr, state: ProofState) -> SearchOutcome:
        if self.budget.time_limit is not None:
            self._deadline = time.monotonic() + self.budget.time_limit
        try:
            for result in self.results(expr, state):
                if result.solved:
                    return SearchOutcome("proved", result.trace, self.stats)
        except _OutOfBudget:
            return SearchOutcome("timed_out", (), self.stats)
        return SearchOutcome("exhausted", (), self.stats)

    def results(self, expr: StrategyExpr, state: ProofState) -> Iterator[ProofState]:
        if isinstance(expr, Atomic):
            yield from self._atomic(expr.name, state)
        elif isinstance(expr, DynamicInduct):
            if not state.goals:
                return
            for tactic in expand_dynamic(state, expr, self.max_arbitrary, self.induct_ordering):
                self.tick()
                yield tactic(state)
        elif isinstance(expr, Thens):
            yield from self._thens(expr.steps, 0, state)
        elif isinstance(expr, Ors):
            for alt in expr.alternatives:
                yield from self.results(alt, state)
        elif isinstance(expr, Repeat):
            yield self._repeat(expr.body, state)
        elif isinstance(expr, Ref):
            if expr.name not in self.strategies:
                raise StrategyError(f"unknown strategy {expr.name!r}")
            yield from self.results(self.strategies[expr.name], state)
        else:
            raise StrategyError(f"not a strategy: {expr!r}")

    def _thens(self, steps: Sequence[StrategyExpr], i: int, state: ProofState) -> Iterator[ProofState]:
        if i == len(steps):
            yield state
            return
        for mid in self.results(steps[i], state):
            yield from self._thens(steps, i + 1, mid)

    def _repeat(self, body: StrategyExpr, state: ProofState) -> ProofState:
        # greedy and committing: never backtracks into earlier iterations
        while True:
            nxt = next(iter(self.results(body, state)), None)
            if nxt is None or nxt.goals == state.goals:
                return state
            state = nxt

    def _atomic(self, name: str, state: ProofState) -> Iterator[ProofState]:
        self.tick()
        if name == "Auto":
            yield tac_auto(state)
        elif name == "IsSolved":
            if not state.goals:
                yield state
        elif name == "Fastforce":
            if not state.goals:
                return
            try:
                result = tac_fastforce(state)
            except TacticFailure:
                self.stats.pruned_fastforce += 1
                return
            self.stats.fastforce_passed += 1
            yield result
        elif name == "Quickcheck":
            if not state.goals:
                yield state
                return
            cex = self._counterexample_search(state.context).search(state.goals[0])
            if cex is not None:
                self.stats.pruned_quickcheck += 1
                self.stats.counterexamples.append((pretty_goal(state.goals[0]), cex))
                return
            self.stats.quickcheck_passed += 1
            yield state.advance(state.goals, QuickcheckStep())
        elif name == "Conjecture":
            if not state.goals:
                return
            goal = state.goals[0]
            conjectures = generate_conjectures(goal, state.context, self.budget.conjecture_limit)
            for c in conjectures:
                self.tick()
                self.stats.conjectures_tried += 1
                goals = insert_conjecture(goal, c) + list(state.goals[1:])
                yield state.advance(goals, ConjectureStep(c.statement))
        else:
            raise StrategyError(f"unknown atomic strategy {name!r}")

    def _counterexample_search(self, ctx: TheoryContext) -> CounterexampleSearch:
        key = id(ctx.functions)
        search = self._quickcheck.get(key)
        if search is None or search.ctx.functions is not ctx.functions:
            search = CounterexampleSearch(ctx, self.size_bound, self.assignment_cap)
            self._quickcheck[key] = search
        return search


def run_strategy(
    expr: StrategyExpr,
    state: ProofState,
    budget: Optional[SearchBudget] = None,
    strategies: Optional[Mapping[str, StrategyExpr]] = None,
    **options,
) -> SearchOutcome:
    """Search for a proof of every goal in ``state`` with ``expr``.

    ``strategies`` resolves named references and defaults to the state's
    context table; extra keyword options go to :class:`Searcher`.
    """
    if strategies is None:
        strategies = state.context.strategies or BUILTIN_STRATEGIES
    searcher = Searcher(strategies, budget or SearchBudget(), **options)
    return searcher.run(expr, state)

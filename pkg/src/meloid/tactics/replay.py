"""Independent re-execution of proof traces, and their text serialization.

Text format, one record per unindented line::

    induct xs arbitrary: ys
    conjecture itrev v1 v2 = app (rev v1) v2
    quickcheck
    auto                      (or: fastforce)
      goal 1 closed equal     (closed contradiction 2 | open)
        lhs def:app:2 @ root with {x=a,xs=xs,ys=Nil}
        rhs ...
        premise-lhs ...
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from meloid.core.terms import App, Equation, SequentGoal, goal_vars, pretty_equation
from meloid.core.theory import TheoryContext
from meloid.rewrite import (
    ReplayError,
    definition_rules,
    lemma_rules,
    parse_step,
    replay_steps,
    rule_table,
)
from meloid.tactics.induction import induct_goal
from meloid.tactics.simp import hypothesis_rules
from meloid.tactics.state import (
    AutoStep,
    ConjectureStep,
    ContractViolation,
    GoalSimplification,
    InductArgs,
    InductStep,
    QuickcheckStep,
    TacticRecord,
)


@dataclass(frozen=True)
class ReplayResult:
    ok: bool
    step: Optional[int] = None  # 1-based index of the offending record
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


class _Replayer:
    def __init__(self, ctx: TheoryContext, lemma_name: str):
        self.ctx = ctx.before(lemma_name)
        self.goals: list[SequentGoal] = [self.ctx.lemma(lemma_name).goal]
        self.base = rule_table(definition_rules(self.ctx) + lemma_rules(self.ctx))

    def table_for(self, goal: SequentGoal) -> dict:
        table = dict(self.base)
        table.update(rule_table(hypothesis_rules(goal)))
        return table

    def apply(self, record: TacticRecord) -> None:
        if isinstance(record, InductStep):
            if not self.goals:
                raise ReplayError("induct with no goals")
            try:
                subgoals = induct_goal(self.ctx, self.goals[0], record.args)
            except ContractViolation as e:
                raise ReplayError(str(e)) from None
            self.goals = subgoals + self.goals[1:]
        elif isinstance(record, ConjectureStep):
            from meloid.conjecture import insert_conjecture  # conjecture imports this package

            if not self.goals:
                raise ReplayError("conjecture with no goals")
            self.goals = insert_conjecture(self.goals[0], record.conjecture) + self.goals[1:]
        elif isinstance(record, QuickcheckStep):
            if not self.goals:
                raise ReplayError("quickcheck with no goals")
        elif isinstance(record, AutoStep):
            self._auto(record)
        else:
            raise ReplayError(f"unknown record {record!r}")

    def _auto(self, record: AutoStep) -> None:
        if record.fastforce:
            if len(record.goals) != 1 or record.goals[0].goal_index != 0 or record.goals[0].closed is None:
                raise ReplayError("fastforce record must close exactly the first goal")
            targets = self.goals[:1]
            untouched = self.goals[1:]
        else:
            if [g.goal_index for g in record.goals] != list(range(len(self.goals))):
                raise ReplayError("auto record does not cover every goal in order")
            targets, untouched = self.goals, []
        remaining = []
        for goal, simp in zip(targets, record.goals):
            new_goal = self._simplify(goal, simp)
            if new_goal is not None:
                remaining.append(new_goal)
        self.goals = remaining + untouched

    def _simplify(self, goal: SequentGoal, simp: GoalSimplification) -> Optional[SequentGoal]:
        table = self.table_for(goal)
        lhs = replay_steps(table, goal.conclusion.lhs, simp.lhs_steps)
        rhs = replay_steps(table, goal.conclusion.rhs, simp.rhs_steps)
        if simp.closed == "equal":
            if lhs != rhs:
                raise ReplayError(f"goal {simp.goal_index + 1} claimed closed but sides differ")
            return None
        if simp.closed == "contradiction":
            idx = simp.premise_index
            if idx is None or not 1 <= idx <= len(goal.premises):
                raise ReplayError("contradiction refers to a missing premise")
            premise = goal.premises[idx - 1]
            pl = replay_steps(self.base, premise.lhs, simp.premise_lhs_steps)
            pr = replay_steps(self.base, premise.rhs, simp.premise_rhs_steps)
            ok = (
                type(pl) is App
                and type(pr) is App
                and pl.symbol in self.ctx.constructors
                and pr.symbol in self.ctx.constructors
                and pl.symbol != pr.symbol
            )
            if not ok:
                raise ReplayError(f"premise {idx} is not contradictory")
            return None
        return SequentGoal(goal.premises, Equation(lhs, rhs), goal.ih_indices)


def replay_trace(ctx: TheoryContext, lemma_name: str, trace: Sequence[TacticRecord]) -> ReplayResult:
    """Re-run every recorded tactic and rewrite step from the lemma's statement."""
    replayer = _Replayer(ctx, lemma_name)
    for i, record in enumerate(trace, 1):
        try:
            replayer.apply(record)
        except ReplayError as e:
            return ReplayResult(False, i, str(e))
    if replayer.goals:
        return ReplayResult(False, len(trace) + 1 if trace else 0, f"{len(replayer.goals)} goal(s) remain")
    return ReplayResult(True)


def format_trace(trace: Sequence[TacticRecord]) -> str:
    lines = []
    for record in trace:
        if isinstance(record, InductStep):
            lines.append(str(record.args))
        elif isinstance(record, ConjectureStep):
            lines.append(f"conjecture {pretty_equation(record.conjecture)}")
        elif isinstance(record, QuickcheckStep):
            lines.append("quickcheck")
        elif isinstance(record, AutoStep):
            lines.append("fastforce" if record.fastforce else "auto")
            for g in record.goals:
                if g.closed == "equal":
                    status = "closed equal"
                elif g.closed == "contradiction":
                    status = f"closed contradiction {g.premise_index}"
                else:
                    status = "open"
                lines.append(f"  goal {g.goal_index + 1} {status}")
                for label, steps in (
                    ("lhs", g.lhs_steps),
                    ("rhs", g.rhs_steps),
                    ("premise-lhs", g.premise_lhs_steps),
                    ("premise-rhs", g.premise_rhs_steps),
                ):
                    lines.extend(f"    {label} {step}" for step in steps)
    return "\n".join(lines) + ("\n" if lines else "")


def parse_trace(ctx: TheoryContext, lemma_name: str, text: str) -> tuple[TacticRecord, ...]:
    """Inverse of :func:`format_trace`.

    Bound terms mention goal variables, so the goals are tracked while parsing
    to recover variable sorts.
    """
    replayer = _Replayer(ctx, lemma_name)
    records: list[TacticRecord] = []
    lines = [l for l in text.splitlines() if l.strip()]
    i = 0
    while i < len(lines):
        head = lines[i].strip()
        i += 1
        if head.startswith("induct "):
            words = head.split()
            arbitrary = tuple(words[3:]) if len(words) > 2 and words[2] == "arbitrary:" else ()
            record: TacticRecord = InductStep(InductArgs(words[1], arbitrary))
        elif head.startswith("conjecture "):
            record = ConjectureStep(ctx.equation(head[len("conjecture ") :]))
        elif head == "quickcheck":
            record = QuickcheckStep()
        elif head in ("auto", "fastforce"):
            goal_records = []
            while i < len(lines) and lines[i].startswith("  goal "):
                words = lines[i].split()
                index = int(words[1]) - 1
                closed, premise_index = None, None
                if words[2] == "closed":
                    closed = words[3]
                    if closed == "contradiction":
                        premise_index = int(words[4])
                i += 1
                if not 0 <= index < len(replayer.goals):
                    raise ValueError(f"trace refers to missing goal {index + 1}")
                goal = replayer.goals[index]
                sorts = _sorts_for(goal, replayer.table_for(goal))
                steps: dict[str, list] = {"lhs": [], "rhs": [], "premise-lhs": [], "premise-rhs": []}
                while i < len(lines) and lines[i].startswith("    "):
                    label, _, rest = lines[i].strip().partition(" ")
                    steps[label].append(
                        parse_step(rest, lambda t, s: ctx.term(t, sorts, s), sorts)
                    )
                    i += 1
                goal_records.append(
                    GoalSimplification(
                        index,
                        tuple(steps["lhs"]),
                        tuple(steps["rhs"]),
                        closed,
                        premise_index,
                        tuple(steps["premise-lhs"]),
                        tuple(steps["premise-rhs"]),
                    )
                )
            record = AutoStep(tuple(goal_records), fastforce=head == "fastforce")
        else:
            raise ValueError(f"malformed trace line: {head!r}")
        records.append(record)
        try:
            replayer.apply(record)
        except ReplayError:
            # keep parsing what is left; replay_trace reports the mismatch
            break
    return tuple(records)


def _sorts_for(goal: SequentGoal, table: dict) -> dict[str, str]:
    sorts = {v.name: v.sort for v in goal_vars(goal)}
    for lhs, _, inst in table.values():
        for v in inst:
            sorts.setdefault(v.name, v.sort)
    return sorts

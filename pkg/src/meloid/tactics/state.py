"""Proof states and the records tactics leave in a proof trace."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from meloid.core.terms import Equation, SequentGoal
from meloid.core.theory import TheoryContext
from meloid.rewrite import Trace


class TacticFailure(Exception):
    """A tactic did not apply; the search backtracks."""


class ContractViolation(ValueError):
    """A tactic was called outside its precondition."""


@dataclass(frozen=True, order=True)
class InductArgs:
    variable: str
    arbitrary: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "arbitrary", tuple(self.arbitrary))

    def __str__(self) -> str:
        if self.arbitrary:
            return f"induct {self.variable} arbitrary: {' '.join(self.arbitrary)}"
        return f"induct {self.variable}"

    def to_json(self) -> dict:
        return {"var": self.variable, "arbitrary": list(self.arbitrary)}

    @classmethod
    def from_json(cls, data: dict) -> "InductArgs":
        return cls(data["var"], tuple(data["arbitrary"]))


@dataclass(frozen=True)
class InductStep:
    args: InductArgs


@dataclass(frozen=True)
class GoalSimplification:
    """What auto did to one goal: rewrite steps per conclusion side and how it closed."""

    goal_index: int
    lhs_steps: Trace
    rhs_steps: Trace
    closed: Optional[str] = None  # "equal" or "contradiction"
    premise_index: Optional[int] = None  # 1-based, for "contradiction"
    premise_lhs_steps: Trace = ()
    premise_rhs_steps: Trace = ()


@dataclass(frozen=True)
class AutoStep:
    goals: tuple[GoalSimplification, ...]
    fastforce: bool = False


@dataclass(frozen=True)
class ConjectureStep:
    conjecture: Equation


@dataclass(frozen=True)
class QuickcheckStep:
    pass


TacticRecord = Union[InductStep, AutoStep, ConjectureStep, QuickcheckStep]


@dataclass(frozen=True)
class ProofState:
    context: TheoryContext
    goals: tuple[SequentGoal, ...]
    trace: tuple[TacticRecord, ...] = field(default=(), compare=False)

    @classmethod
    def initial(cls, context: TheoryContext, goal: SequentGoal) -> "ProofState":
        return cls(context, (goal,), ())

    @property
    def solved(self) -> bool:
        return not self.goals

    def first_goal(self) -> SequentGoal:
        if not self.goals:
            raise ContractViolation("no goals left")
        return self.goals[0]

    def advance(self, goals, record: TacticRecord) -> "ProofState":
        return ProofState(self.context, tuple(goals), self.trace + (record,))

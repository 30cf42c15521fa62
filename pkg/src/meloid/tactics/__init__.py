"""Proof states and the atomic proof steps."""

from meloid.tactics.counterexample import Counterexample, CounterexampleSearch, find_counterexample
from meloid.tactics.induction import apply_induct, enumerate_induct_args, induct_goal
from meloid.tactics.replay import ReplayResult, format_trace, parse_trace, replay_trace
from meloid.tactics.simp import tac_auto, tac_fastforce, tac_is_solved
from meloid.tactics.state import (
    AutoStep,
    ConjectureStep,
    ContractViolation,
    GoalSimplification,
    InductArgs,
    InductStep,
    ProofState,
    QuickcheckStep,
    TacticFailure,
)

__all__ = [
    "AutoStep",
    "ConjectureStep",
    "ContractViolation",
    "Counterexample",
    "CounterexampleSearch",
    "GoalSimplification",
    "InductArgs",
    "InductStep",
    "ProofState",
    "QuickcheckStep",
    "ReplayResult",
    "TacticFailure",
    "apply_induct",
    "enumerate_induct_args",
    "find_counterexample",
    "format_trace",
    "induct_goal",
    "parse_trace",
    "replay_trace",
    "tac_auto",
    "tac_fastforce",
    "tac_is_solved",
]

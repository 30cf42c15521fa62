"""Active mining: apply every induct variant to every corpus lemma and label the outcome."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

from meloid.core.terms import SequentGoal
from meloid.core.theory import TheoryContext
from meloid.learn.features import FeatureVector, Triple, extract_features
from meloid.prover import prove_lemma
from meloid.strategy.search import SearchBudget, run_strategy
from meloid.strategy.syntax import BUILTIN_STRATEGIES, Ref
from meloid.tactics.induction import MAX_ARBITRARY, apply_induct, enumerate_induct_args
from meloid.tactics.simp import tac_auto
from meloid.tactics.state import InductArgs, ProofState

log = logging.getLogger(__name__)

DEFAULT_NODE_LIMIT = 2_000
LABELS = (0.0, 0.5, 1.0)


@dataclass(frozen=True)
class DataRecord:
    theory: str
    lemma: str
    variant: InductArgs
    features: FeatureVector
    label: float
    index: int = 0  # position of the variant in enumeration order

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label}")

    def to_json(self) -> dict:
        return {
            "theory": self.theory,
            "lemma": self.lemma,
            "variant": self.variant.to_json(),
            "features": self.features.to_list(),
            "label": self.label,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


@dataclass(frozen=True)
class MiningConfig:
    max_arbitrary: int = MAX_ARBITRARY
    node_limit: int = DEFAULT_NODE_LIMIT  # per nested search and per corpus proof
    lemma_time_limit: Optional[float] = None  # seconds; None keeps mining deterministic


class _LemmaTimeout(Exception):
    pass


def label_variant(
    ctx: TheoryContext, goal: SequentGoal, args: InductArgs, node_limit: int = DEFAULT_NODE_LIMIT, deadline=None
) -> float:
    """1.0 if induct+auto closes the goal, 0.5 if one nested DInd closes each leftover, else 0.0."""
    state = tac_auto(apply_induct(ProofState.initial(ctx, goal), args))
    if state.solved:
        return 1.0
    budget = SearchBudget(time_limit=None, node_limit=node_limit)
    for g in state.goals:
        if deadline is not None and time.monotonic() > deadline:
            raise _LemmaTimeout()
        outcome = run_strategy(Ref("DInd"), ProofState.initial(ctx, g), budget, strategies=BUILTIN_STRATEGIES)
        if not outcome.proved:
            return 0.0
    return 0.5


def mine_lemma(ctx: TheoryContext, lemma_name: str, config: MiningConfig = MiningConfig()) -> list[DataRecord]:
    """Records for one lemma; ``ctx`` decides which earlier lemmas count as proved."""
    goal = ctx.lemma(lemma_name).goal
    deadline = time.monotonic() + config.lemma_time_limit if config.lemma_time_limit else None
    records = []
    for i, args in enumerate(enumerate_induct_args(goal, config.max_arbitrary)):
        triple = Triple.build(ctx, goal, args)
        features = extract_features(triple)
        label = label_variant(ctx, goal, args, config.node_limit, deadline)
        records.append(DataRecord(ctx.name, lemma_name, args, features, label, i))
    return records


def mine_theory(ctx: TheoryContext, config: MiningConfig = MiningConfig()) -> Iterator[DataRecord]:
    """Mine lemmas in file order; a lemma joins the context once its own strategy proves it."""
    budget = SearchBudget(time_limit=None, node_limit=max(config.node_limit, 5_000))
    for lemma in ctx.lemmas:
        current = ctx.before(lemma.name)
        try:
            yield from mine_lemma(current, lemma.name, config)
        except _LemmaTimeout:
            log.warning("%s.%s: mining timed out, lemma skipped", ctx.name, lemma.name)
        if prove_lemma(current, lemma.name, budget).proved:
            ctx = ctx.with_lemma_status(lemma.name, True)


def active_mine(theories: Iterable[TheoryContext], config: MiningConfig = MiningConfig()) -> list[DataRecord]:
    records = [r for ctx in theories for r in mine_theory(ctx, config)]
    records.sort(key=lambda r: (r.theory, r.lemma, r.index))
    keys = {(r.theory, r.lemma, r.variant) for r in records}
    if len(keys) != len(records):
        raise ValueError("duplicate (theory, lemma, variant) keys")
    return records


def write_jsonl(records: Sequence[DataRecord], path) -> None:
    text = "".join(r.dumps() + "\n" for r in records)
    Path(path).write_text(text, encoding="utf-8")


def read_jsonl(path) -> list[DataRecord]:
    records = []
    lemma_counts: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                key = (data["theory"], data["lemma"])
                index = lemma_counts.get(key, 0)
                lemma_counts[key] = index + 1
                records.append(
                    DataRecord(
                        data["theory"],
                        data["lemma"],
                        InductArgs.from_json(data["variant"]),
                        FeatureVector.from_list(data["features"]),
                        float(data["label"]),
                        index,
                    )
                )
            except (KeyError, TypeError, ValueError) as e:
                raise ValueError(f"{path}:{lineno}: bad record ({e})") from None
    return records

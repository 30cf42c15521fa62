"""Grouped k-fold cross-validation with top-k hit rates and an analytic random baseline."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from meloid.learn.mining import DataRecord
from meloid.learn.tree import TreeParams, train_tree


@dataclass(frozen=True)
class Metrics:
    records: int
    folds: int
    mse: float
    goals_with_positive: int
    top1: Optional[float]  # None when no goal has a positive variant
    top3: Optional[float]
    random_top1: Optional[float]
    random_top3: Optional[float]

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _group_key(theory: str, lemma: str) -> str:
    return hashlib.sha256(f"{theory}\x00{lemma}".encode("utf-8")).hexdigest()


def assign_folds(records: Sequence[DataRecord], folds: int) -> dict[tuple[str, str], int]:
    """Groups sorted by hash, dealt round-robin; ``folds`` = group count gives leave-one-lemma-out."""
    groups = sorted({(r.theory, r.lemma) for r in records}, key=lambda g: _group_key(*g))
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if folds > len(groups):
        raise ValueError(f"{folds} folds but only {len(groups)} lemmas")
    return {g: i % folds for i, g in enumerate(groups)}


def random_hit_rate(n: int, positives: int, k: int) -> float:
    """Chance that a uniformly random ranking puts a positive among the first ``k``."""
    if k >= n:
        return 1.0 if positives else 0.0
    return 1.0 - math.comb(n - positives, k) / math.comb(n, k)


def evaluate_model(
    records: Sequence[DataRecord], params: Optional[TreeParams] = None, folds: Optional[int] = None
) -> Metrics:
    """Cross-validate; ``folds=None`` means leave one lemma out."""
    if not records:
        raise ValueError("empty dataset")
    params = params or TreeParams()
    n_groups = len({(r.theory, r.lemma) for r in records})
    folds = n_groups if folds is None else folds
    fold_of = assign_folds(records, folds)
    scores: dict[int, float] = {}
    for k in range(folds):
        train = [r for r in records if fold_of[(r.theory, r.lemma)] != k]
        test = [(i, r) for i, r in enumerate(records) if fold_of[(r.theory, r.lemma)] == k]
        if not test:
            continue
        tree = train_tree([r.features.bits for r in train], [r.label for r in train], params)
        for i, r in test:
            scores[i] = tree.predict(r.features.bits)[0]
    mse = math.fsum((scores[i] - r.label) ** 2 for i, r in enumerate(records)) / len(records)

    by_goal: dict[tuple[str, str], list[int]] = {}
    for i, r in enumerate(records):
        by_goal.setdefault((r.theory, r.lemma), []).append(i)
    hits1, hits3, base1, base3 = [], [], [], []
    for idxs in by_goal.values():
        idxs = sorted(idxs, key=lambda i: records[i].index)
        positives = sum(1 for i in idxs if records[i].label == 1.0)
        if not positives:
            continue
        ranked = sorted(idxs, key=lambda i: -scores[i])
        hits1.append(records[ranked[0]].label == 1.0)
        hits3.append(any(records[i].label == 1.0 for i in ranked[:3]))
        base1.append(random_hit_rate(len(idxs), positives, 1))
        base3.append(random_hit_rate(len(idxs), positives, 3))

    def mean(xs) -> Optional[float]:
        return math.fsum(xs) / len(xs) if xs else None

    return Metrics(
        records=len(records),
        folds=folds,
        mse=mse,
        goals_with_positive=len(hits1),
        top1=mean(hits1),
        top3=mean(hits3),
        random_top1=mean(base1),
        random_top3=mean(base3),
    )

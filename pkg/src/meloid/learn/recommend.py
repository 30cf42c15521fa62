"""Ranking induct variants for a goal with a trained tree."""

from __future__ import annotations

from dataclasses import dataclass

from meloid.core.terms import SequentGoal
from meloid.core.theory import TheoryContext
from meloid.learn.features import Triple, extract_features
from meloid.learn.tree import RegressionTree
from meloid.tactics.induction import MAX_ARBITRARY, enumerate_induct_args
from meloid.tactics.state import InductArgs


@dataclass(frozen=True)
class RankedVariant:
    args: InductArgs
    score: float
    path: tuple[tuple[str, bool], ...]

    def path_text(self) -> str:
        return ",".join(f"{a}{'+' if bit else '-'}" for a, bit in self.path)

    def to_json(self) -> dict:
        return {
            "variant": self.args.to_json(),
            "score": self.score,
            "path": [[a, bit] for a, bit in self.path],
        }


@dataclass(frozen=True)
class Recommendation:
    ranked: tuple[RankedVariant, ...]

    def __len__(self) -> int:
        return len(self.ranked)

    def __iter__(self):
        return iter(self.ranked)


def score_variants(
    context: TheoryContext, goal: SequentGoal, model: RegressionTree, max_arbitrary: int = MAX_ARBITRARY
) -> list[RankedVariant]:
    """Every variant in enumeration order, scored; each one really applies induct."""
    out = []
    for args in enumerate_induct_args(goal, max_arbitrary):
        score, path = model.predict(extract_features(Triple.build(context, goal, args)).bits)
        out.append(RankedVariant(args, score, tuple(path)))
    return out


def recommend(
    context: TheoryContext,
    goal: SequentGoal,
    model: RegressionTree,
    top_k: int = 3,
    max_arbitrary: int = MAX_ARBITRARY,
) -> Recommendation:
    if top_k < 1:
        raise ValueError("top_k must be positive")
    scored = score_variants(context, goal, model, max_arbitrary)
    # sorted() is stable, so ties keep enumeration order
    ranked = sorted(scored, key=lambda r: -r.score)
    return Recommendation(tuple(ranked[:top_k]))


def ordering_from_model(model: RegressionTree):
    """An induct-ordering hook for the strategy searcher."""

    def order(state, variants: list[InductArgs]) -> list[InductArgs]:
        goal = state.goals[0]
        scores = {
            a: model.predict(extract_features(Triple.build(state.context, goal, a)).bits)[0] for a in variants
        }
        return sorted(variants, key=lambda a: -scores[a])

    return order

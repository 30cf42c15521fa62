"""Proving the lemmas of a theory in file order."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, Optional

from meloid.core.theory import TheoryContext
from meloid.strategy.search import SearchBudget, SearchOutcome, run_strategy
from meloid.strategy.syntax import Ref
from meloid.tactics.state import ProofState

log = logging.getLogger(__name__)

DEFAULT_STRATEGY = "DInd"


@dataclass(frozen=True)
class LemmaResult:
    lemma: str
    strategy: str
    outcome: SearchOutcome
    context: TheoryContext  # the context the lemma was proved in

    @property
    def proved(self) -> bool:
        return self.outcome.proved


def prove_lemma(ctx: TheoryContext, name: str, budget: Optional[SearchBudget] = None, **options) -> LemmaResult:
    """Run the lemma's strategy in ``ctx`` as given (callers control which lemmas count as proved)."""
    lemma = ctx.lemma(name)
    strategy = lemma.strategy or DEFAULT_STRATEGY
    outcome = run_strategy(Ref(strategy), ProofState.initial(ctx, lemma.goal), budget, **options)
    return LemmaResult(name, strategy, outcome, ctx)


def prove_theory(
    ctx: TheoryContext,
    budget: Optional[SearchBudget] = None,
    only: Optional[str] = None,
    **options,
) -> Iterator[LemmaResult]:
    """Prove lemmas in file order; each proved lemma joins the simp set for later ones.

    With ``only``, earlier lemmas are still proved (silently) so the context
    matches a full run.
    """
    for lemma in ctx.lemmas:
        current = ctx.before(lemma.name)
        result = prove_lemma(current, lemma.name, budget, **options)
        if result.proved:
            ctx = ctx.with_lemma_status(lemma.name, True)
        else:
            log.info("lemma %s not proved (%s)", lemma.name, result.outcome.status)
        if only is None or only == lemma.name:
            yield result
        if only == lemma.name:
            return

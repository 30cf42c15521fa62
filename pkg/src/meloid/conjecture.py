"""Candidate auxiliary lemmas generalized from a goal, and their insertion as premises."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from meloid.core.terms import (
    App,
    Equation,
    Position,
    SequentGoal,
    Term,
    Var,
    alpha_equivalent,
    equation_vars,
    pretty_equation,
    pretty_term,
    rename_equation_canonically,
    replace_at,
    subst_equation,
    subterms,
    term_size,
)
from meloid.core.theory import TheoryContext
from meloid.rewrite import is_constructor_term
from meloid.tactics.counterexample import CounterexampleSearch

MAX_CONJECTURES = 64
_IDENTITY_SIZE_BOUND = 7
_IDENTITY_CAP = 2_000


@dataclass(frozen=True)
class Conjecture:
    statement: Equation
    generator: str  # "g1-subterm", "g2-constant" or "g3-extension"
    provenance: str

    def __str__(self) -> str:
        return f"{pretty_equation(self.statement)}  [{self.generator}: {self.provenance}]"


def _side_positions(eq: Equation) -> Iterator[tuple[int, Position, Term]]:
    """Occurrences in both sides, leftmost-outermost first; side 1 is the lhs."""
    for side, term in ((1, eq.lhs), (2, eq.rhs)):
        for pos, sub in subterms(term):
            yield side, pos, sub


def _replace_side(eq: Equation, side: int, pos: Position, new: Term) -> Equation:
    if side == 1:
        return Equation(replace_at(eq.lhs, pos, new), eq.rhs)
    return Equation(eq.lhs, replace_at(eq.rhs, pos, new))


def _replace_all(t: Term, target: Term, new: Term) -> Term:
    if t == target:
        return new
    if type(t) is Var:
        return t
    return App(t.symbol, tuple(_replace_all(a, target, new) for a in t.args), t.sort)


def _path(side: int, pos: Position) -> str:
    return ".".join(["lhs" if side == 1 else "rhs", *map(str, pos)])


class _IdentityOracle:
    """Decides by bounded testing whether ``c`` is a left/right identity of ``f``."""

    def __init__(self, ctx: TheoryContext):
        self.ctx = ctx
        self.search = CounterexampleSearch(ctx, _IDENTITY_SIZE_BOUND, _IDENTITY_CAP)
        self.cache: dict = {}

    def __call__(self, fname: str, const: Term, const_first: bool) -> bool:
        key = (fname, const, const_first)
        if key not in self.cache:
            f = self.ctx.functions[fname]
            other = f.arg_sorts[0] if not const_first else f.arg_sorts[1]
            x = Var("x", other)
            args = (const, x) if const_first else (x, const)
            goal = SequentGoal((), Equation(App(fname, args, f.result_sort), x))
            self.cache[key] = self.search.search(goal) is None
        return self.cache[key]


_ORACLES: dict[int, tuple[TheoryContext, _IdentityOracle]] = {}


def _oracle(ctx: TheoryContext) -> _IdentityOracle:
    hit = _ORACLES.get(id(ctx.functions))
    if hit is None or hit[0].functions is not ctx.functions:
        hit = (ctx, _IdentityOracle(ctx))
        _ORACLES[id(ctx.functions)] = hit
    return hit[1]


def generate_conjectures(goal: SequentGoal, ctx: TheoryContext, limit: int = MAX_CONJECTURES) -> list[Conjecture]:
    concl = goal.conclusion
    out: list[Conjecture] = []
    seen: list[Equation] = []

    def emit(eq: Equation, generator: str, provenance: str) -> None:
        if len(out) >= limit or eq.lhs == eq.rhs:
            return
        canon = rename_equation_canonically(eq)
        if alpha_equivalent(canon, concl) or canon in seen:
            return
        seen.append(canon)
        out.append(Conjecture(canon, generator, provenance))

    # g1: every occurrence of a repeated non-variable subterm becomes one variable
    counts: dict[Term, int] = {}
    for _, _, sub in _side_positions(concl):
        if type(sub) is App:
            counts[sub] = counts.get(sub, 0) + 1
    for sub, n in counts.items():
        if n >= 2:
            v = Var("__g", sub.sort)
            emit(Equation(_replace_all(concl.lhs, sub, v), _replace_all(concl.rhs, sub, v)), "g1-subterm",
                 f"all {pretty_term(sub)}")

    # g2: one occurrence of a small constructor term becomes a variable
    g2 = []
    for side, pos, sub in _side_positions(concl):
        if type(sub) is App and term_size(sub) <= 2 and is_constructor_term(ctx, sub):
            v = Var("__g", sub.sort)
            g2.append((side, pos, sub, v))
            emit(_replace_side(concl, side, pos, v), "g2-constant", f"{_path(side, pos)} {pretty_term(sub)}")

    # g3: additionally wrap the other side with a binary function that has the constant as identity
    identity = _oracle(ctx)
    binary = [f for f in ctx.functions.values() if f.arity == 2]
    for side, pos, const, v in g2:
        generalized = _replace_side(concl, side, pos, v)
        other = generalized.rhs if side == 1 else generalized.lhs
        for f in binary:
            for const_first in (False, True):
                wanted = (v.sort, other.sort) if const_first else (other.sort, v.sort)
                if f.arg_sorts != wanted or f.result_sort != other.sort:
                    continue
                if not identity(f.name, const, const_first):
                    continue
                args = (v, other) if const_first else (other, v)
                wrapped = App(f.name, args, f.result_sort)
                eq = Equation(generalized.lhs, wrapped) if side == 1 else Equation(wrapped, generalized.rhs)
                emit(eq, "g3-extension", f"{_path(side, pos)} {pretty_term(const)} via {f.name}")
    return out


def schematic_copy(eq: Equation) -> Equation:
    return subst_equation({v: Var("?" + v.name, v.sort) for v in equation_vars(eq)}, eq)


def insert_conjecture(goal: SequentGoal, conjecture) -> list[SequentGoal]:
    """``[goal with the conjecture as a premise, the conjecture itself]``."""
    statement = conjecture.statement if isinstance(conjecture, Conjecture) else conjecture
    statement = rename_equation_canonically(statement)
    implication = SequentGoal(goal.premises + (schematic_copy(statement),), goal.conclusion, goal.ih_indices)
    return [implication, SequentGoal((), statement)]

"""The fixed catalog of 40 boolean assertions over (goal, induct arguments, subgoals) triples."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from meloid.core.terms import (
    App,
    Equation,
    SequentGoal,
    Term,
    Var,
    equation_vars,
    goal_size,
    goals_alpha_equivalent,
    iter_vars,
    match,
    subterms,
    symbols,
)
from meloid.core.theory import TheoryContext
from meloid.rewrite import FEATURE_BUDGET, SimpSet, definitional_simpset, normalize
from meloid.tactics.induction import induct_goal
from meloid.tactics.simp import hypothesis_rules
from meloid.tactics.state import InductArgs

_CATALOG_ENTRIES = (
    ("A01", "goal has at least one premise"),
    ("A02", "conclusion lhs head is a defined function"),
    ("A03", "conclusion rhs head is a defined function"),
    ("A04", "conclusion rhs is a variable"),
    ("A05", "some variable occurs at least twice in the conclusion"),
    ("A06", "at least two free variables"),
    ("A07", "at least three free variables"),
    ("A08", "at least two distinct defined functions occur"),
    ("A09", "some occurring function has a recursion position other than 1"),
    ("A10", "some occurring function's defining rhs mentions another defined function"),
    ("A11", "a proved lemma in the context mentions a function occurring in the goal"),
    ("A12", "lhs and rhs share a common non-variable subterm"),
    ("B01", "induction variable occurs in the conclusion lhs"),
    ("B02", "induction variable occurs in the conclusion rhs"),
    ("B03", "induction variable occurs in some premise"),
    ("B04", "induction variable is a recursion-position argument of some defined-function occurrence"),
    ("B05", "induction variable is a recursion-position argument of the outermost lhs function"),
    ("B06", "induction variable occurs at least twice"),
    ("B07", "its datatype has a recursive constructor"),
    ("B08", "its datatype has at least two constructors"),
    ("B09", "every occurrence directly under a defined function is at a recursion position"),
    ("B10", "arbitrary set is empty"),
    ("B11", "every other variable at a non-recursion position of a recursive occurrence containing it is arbitrary"),
    ("B12", "some arbitrary variable does not occur in the goal"),
    ("C01", "induct produced at least one subgoal"),
    ("C02", "subgoal count equals constructor count"),
    ("C03", "some subgoal carries an induction hypothesis"),
    ("C04", "every hypothesis lhs matches a subterm of its subgoal conclusion"),
    ("C05", "as C04 after budgeted simplification of the subgoal conclusion"),
    ("C06", "some base case discharges by budgeted simplification"),
    ("C07", "every base case discharges by budgeted simplification"),
    ("C08", "some hypothesis-carrying subgoal discharges by budgeted simplification with hypotheses"),
    ("C09", "every subgoal discharges by budgeted simplification with hypotheses"),
    ("C10", "after budgeted simplification some subgoal contains a stuck application"),
    ("C11", "some subgoal conclusion has syntactically equal sides"),
    ("C12", "some hypothesis has schematic variables"),
    ("C13", "some schematic hypothesis variable is a non-recursion argument of the hypothesis lhs head"),
    ("C14", "total subgoal size at most twice the goal size"),
    ("C15", "total subgoal size at least four times the goal size"),
    ("C16", "some subgoal equals the goal up to renaming"),
)

ASSERTION_IDS: tuple[str, ...] = tuple(i for i, _ in _CATALOG_ENTRIES)
CATALOG_TEXT = "".join(f"{i} {text}\n" for i, text in _CATALOG_ENTRIES)
CATALOG_HASH = hashlib.sha256(CATALOG_TEXT.encode("utf-8")).hexdigest()
NUM_FEATURES = len(ASSERTION_IDS)
assert NUM_FEATURES == 40


@dataclass(frozen=True)
class Triple:
    context: TheoryContext
    goal: SequentGoal
    args: InductArgs
    subgoals: tuple[SequentGoal, ...]

    @classmethod
    def build(cls, context: TheoryContext, goal: SequentGoal, args: InductArgs) -> "Triple":
        return cls(context, goal, args, tuple(induct_goal(context, goal, args)))


@dataclass(frozen=True)
class FeatureVector:
    bits: tuple[bool, ...]

    def __post_init__(self):
        if len(self.bits) != NUM_FEATURES:
            raise ValueError(f"expected {NUM_FEATURES} bits, got {len(self.bits)}")

    def __getitem__(self, key) -> bool:
        if isinstance(key, str):
            return self.bits[ASSERTION_IDS.index(key)]
        return self.bits[key]

    def __len__(self) -> int:
        return NUM_FEATURES

    def to_list(self) -> list[int]:
        return [int(b) for b in self.bits]

    @classmethod
    def from_list(cls, values) -> "FeatureVector":
        return cls(tuple(bool(v) for v in values))


def _equations(goal: SequentGoal) -> tuple[Equation, ...]:
    return (goal.conclusion,) + goal.premises


def _all_subterms(goal: SequentGoal) -> Iterator[Term]:
    for eq in _equations(goal):
        for side in (eq.lhs, eq.rhs):
            for _, sub in subterms(side):
                yield sub


def _occurs(name: str, t: Term) -> bool:
    return any(v.name == name for v in iter_vars(t))


def _count(name: str, terms) -> int:
    return sum(1 for t in terms for v in iter_vars(t) if v.name == name)


def _is_fun_app(ctx: TheoryContext, t: Term) -> bool:
    return type(t) is App and t.symbol in ctx.functions


def _is_stuck(ctx: TheoryContext, t: Term) -> bool:
    if not _is_fun_app(ctx, t):
        return False
    for p in ctx.functions[t.symbol].recursion_positions:
        arg = t.args[p - 1]
        if type(arg) is App and arg.symbol in ctx.functions:
            return True
    return False


@dataclass
class _Simplified:
    lhs: Term
    rhs: Term
    exhausted: bool

    @property
    def discharged(self) -> bool:
        return not self.exhausted and self.lhs == self.rhs


class _Extractor:
    def __init__(self, triple: Triple, budget: int):
        self.t = triple
        self.ctx = triple.context
        self.goal = triple.goal
        self.budget = budget
        self.base: SimpSet = definitional_simpset(self.ctx)
        var = next((v for v in self.goal.fixed_vars if v.name == triple.args.variable), None)
        if var is None:
            raise ValueError(f"{triple.args.variable!r} is not a free variable of the goal")
        self.var = var
        self.datatype = self.ctx.datatypes[var.sort]
        # subgoals follow the constructors in declaration order
        self.base_cases = [
            g for g, c in zip(triple.subgoals, self.datatype.constructors) if not c.recursive_args
        ]
        self.ih_goals = [g for g in triple.subgoals if g.ih_indices]
        self._cache: dict = {}

    def simplified(self, goal: SequentGoal, with_hyps: bool) -> _Simplified:
        key = (id(goal), with_hyps)
        hit = self._cache.get(key)
        if hit is None:
            simpset = self.base.extended(hypothesis_rules(goal)) if with_hyps else self.base
            usage: dict = {}
            lhs = normalize(simpset, goal.conclusion.lhs, self.budget, usage)
            rhs = normalize(simpset, goal.conclusion.rhs, self.budget - len(lhs.trace), usage)
            hit = _Simplified(lhs.term, rhs.term, lhs.exhausted or rhs.exhausted)
            self._cache[key] = hit
        return hit

    # group A: the goal and its context

    def functions(self) -> set[str]:
        return {s for t in _all_subterms(self.goal) if _is_fun_app(self.ctx, t) for s in (t.symbol,)}

    def A01(self):
        return len(self.goal.premises) >= 1

    def A02(self):
        return _is_fun_app(self.ctx, self.goal.conclusion.lhs)

    def A03(self):
        return _is_fun_app(self.ctx, self.goal.conclusion.rhs)

    def A04(self):
        return type(self.goal.conclusion.rhs) is Var

    def A05(self):
        c = self.goal.conclusion
        names = [v.name for side in (c.lhs, c.rhs) for v in iter_vars(side)]
        return len(names) != len(set(names))

    def A06(self):
        return len(self.goal.fixed_vars) >= 2

    def A07(self):
        return len(self.goal.fixed_vars) >= 3

    def A08(self):
        return len(self.functions()) >= 2

    def A09(self):
        return any(p != 1 for f in self.functions() for p in self.ctx.functions[f].recursion_positions)

    def A10(self):
        for f in self.functions():
            for eq in self.ctx.functions[f].equations:
                if any(s != f and s in self.ctx.functions for s in symbols(eq.rhs)):
                    return True
        return False

    def A11(self):
        fs = self.functions()
        for lem in self.ctx.proved_lemmas:
            if any(s in fs for eq in _equations(lem.goal) for side in (eq.lhs, eq.rhs) for s in symbols(side)):
                return True
        return False

    def A12(self):
        c = self.goal.conclusion
        left = {sub for _, sub in subterms(c.lhs) if type(sub) is App}
        return any(type(sub) is App and sub in left for _, sub in subterms(c.rhs))

    # group B: the induct arguments against the goal

    def _direct_positions(self) -> Iterator[tuple[App, int]]:
        """(function occurrence, 1-based index) for every direct occurrence of the induction variable."""
        for t in _all_subterms(self.goal):
            if _is_fun_app(self.ctx, t):
                for i, a in enumerate(t.args, 1):
                    if a == self.var:
                        yield t, i

    def B01(self):
        return _occurs(self.var.name, self.goal.conclusion.lhs)

    def B02(self):
        return _occurs(self.var.name, self.goal.conclusion.rhs)

    def B03(self):
        return any(_occurs(self.var.name, side) for p in self.goal.premises for side in (p.lhs, p.rhs))

    def B04(self):
        return any(i in self.ctx.functions[f.symbol].recursion_positions for f, i in self._direct_positions())

    def B05(self):
        lhs = self.goal.conclusion.lhs
        if not _is_fun_app(self.ctx, lhs):
            return False
        return any(lhs.args[p - 1] == self.var for p in self.ctx.functions[lhs.symbol].recursion_positions)

    def B06(self):
        return _count(self.var.name, (s for eq in _equations(self.goal) for s in (eq.lhs, eq.rhs))) >= 2

    def B07(self):
        return self.datatype.has_recursive_constructor

    def B08(self):
        return len(self.datatype.constructors) >= 2

    def B09(self):
        return all(i in self.ctx.functions[f.symbol].recursion_positions for f, i in self._direct_positions())

    def B10(self):
        return not self.t.args.arbitrary

    def B11(self):
        arbitrary = set(self.t.args.arbitrary)
        for t in _all_subterms(self.goal):
            if not _is_fun_app(self.ctx, t) or not self.ctx.functions[t.symbol].is_recursive:
                continue
            if not _occurs(self.var.name, t):
                continue
            positions = self.ctx.functions[t.symbol].recursion_positions
            for i, a in enumerate(t.args, 1):
                if i not in positions and type(a) is Var and a != self.var and a.name not in arbitrary:
                    return False
        return True

    def B12(self):
        names = {v.name for v in self.goal.fixed_vars}
        return any(a not in names for a in self.t.args.arbitrary)

    # group C: the emerging subgoals

    def C01(self):
        return len(self.t.subgoals) >= 1

    def C02(self):
        return len(self.t.subgoals) == len(self.datatype.constructors)

    def C03(self):
        return bool(self.ih_goals)

    def _ih_matches(self, goal: SequentGoal, target: Term) -> bool:
        subs = [sub for _, sub in subterms(target)]
        for ih in goal.hypotheses:
            inst = [v for v in equation_vars(ih) if v.is_schematic]
            if not any(match(ih.lhs, s, inst) is not None for s in subs):
                return False
        return True

    def C04(self):
        return all(
            self._ih_matches(g, g.conclusion.lhs) or self._ih_matches(g, g.conclusion.rhs) for g in self.ih_goals
        )

    def C05(self):
        for g in self.ih_goals:
            s = self.simplified(g, False)
            if s.exhausted or not (self._ih_matches(g, s.lhs) or self._ih_matches(g, s.rhs)):
                return False
        return True

    def C06(self):
        return any(self.simplified(g, False).discharged for g in self.base_cases)

    def C07(self):
        return all(self.simplified(g, False).discharged for g in self.base_cases)

    def C08(self):
        return any(self.simplified(g, True).discharged for g in self.ih_goals)

    def C09(self):
        return all(self.simplified(g, True).discharged for g in self.t.subgoals)

    def C10(self):
        for g in self.t.subgoals:
            s = self.simplified(g, False)
            if s.exhausted:
                continue
            if any(_is_stuck(self.ctx, sub) for side in (s.lhs, s.rhs) for _, sub in subterms(side)):
                return True
        return False

    def C11(self):
        return any(g.conclusion.lhs == g.conclusion.rhs for g in self.t.subgoals)

    def C12(self):
        return any(v.is_schematic for g in self.ih_goals for ih in g.hypotheses for v in equation_vars(ih))

    def C13(self):
        for g in self.ih_goals:
            for ih in g.hypotheses:
                head = ih.lhs
                if not _is_fun_app(self.ctx, head):
                    continue
                positions = self.ctx.functions[head.symbol].recursion_positions
                for i, a in enumerate(head.args, 1):
                    if i not in positions and type(a) is Var and a.is_schematic:
                        return True
        return False

    def _size_ratio_ok(self, pred: Callable[[int, int], bool]) -> bool:
        return pred(sum(goal_size(g) for g in self.t.subgoals), goal_size(self.goal))

    def C14(self):
        return self._size_ratio_ok(lambda total, size: total <= 2 * size)

    def C15(self):
        return self._size_ratio_ok(lambda total, size: total >= 4 * size)

    def C16(self):
        return any(goals_alpha_equivalent(g, self.goal) for g in self.t.subgoals)


def extract_features(triple: Triple, budget: int = FEATURE_BUDGET) -> FeatureVector:
    ex = _Extractor(triple, budget)
    return FeatureVector(tuple(bool(getattr(ex, i)()) for i in ASSERTION_IDS))


def describe(assertion_id: str) -> Optional[str]:
    return dict(_CATALOG_ENTRIES).get(assertion_id)

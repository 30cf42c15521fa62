"""Elaboration of parsed theory files into a typed :class:`TheoryContext`."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from meloid.core.syntax import (
    RawDatatype,
    RawEquation,
    RawFun,
    RawLemma,
    RawStrategy,
    RawTerm,
    TheoryFile,
    parse_equation_text,
    parse_goal_text,
    parse_term_text,
    parse_theory,
)
from meloid.core.terms import App, Equation, SequentGoal, Term, Var, iter_vars, subterms, term_size
from meloid.strategy.syntax import BUILTIN_STRATEGIES, StrategyError, StrategyExpr, check_references


class ElaborationError(Exception):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"{message} (line {line})" if line else message)


@dataclass(frozen=True)
class Constructor:
    name: str
    arg_sorts: tuple[str, ...]
    sort: str

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    @property
    def recursive_args(self) -> tuple[int, ...]:
        """0-based indices of arguments of the constructor's own sort."""
        return tuple(i for i, s in enumerate(self.arg_sorts) if s == self.sort)


@dataclass(frozen=True)
class DatatypeDef:
    sort: str
    constructors: tuple[Constructor, ...]

    @property
    def has_recursive_constructor(self) -> bool:
        return any(c.recursive_args for c in self.constructors)


@dataclass(frozen=True)
class FunctionDef:
    name: str
    arg_sorts: tuple[str, ...]
    result_sort: str
    equations: tuple[Equation, ...]
    recursion_positions: frozenset[int]  # 1-based argument indices

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    @property
    def is_recursive(self) -> bool:
        return any(
            type(t) is App and t.symbol == self.name for eq in self.equations for _, t in subterms(eq.rhs)
        )


@dataclass(frozen=True)
class Lemma:
    name: str
    goal: SequentGoal
    strategy: Optional[str] = None
    proved: bool = False


@dataclass(frozen=True)
class TheoryContext:
    name: str
    datatypes: Mapping[str, DatatypeDef]
    constructors: Mapping[str, Constructor]
    functions: Mapping[str, FunctionDef]
    lemmas: tuple[Lemma, ...] = ()
    strategies: Mapping[str, StrategyExpr] = field(default_factory=lambda: dict(BUILTIN_STRATEGIES))

    def lemma(self, name: str) -> Lemma:
        for lem in self.lemmas:
            if lem.name == name:
                return lem
        raise KeyError(f"no lemma named {name!r}")

    def lemma_index(self, name: str) -> int:
        for i, lem in enumerate(self.lemmas):
            if lem.name == name:
                return i
        raise KeyError(f"no lemma named {name!r}")

    @property
    def proved_lemmas(self) -> tuple[Lemma, ...]:
        return tuple(lem for lem in self.lemmas if lem.proved)

    def with_lemma_status(self, name: str, proved: bool) -> "TheoryContext":
        lemmas = tuple(dataclasses.replace(l, proved=proved) if l.name == name else l for l in self.lemmas)
        return dataclasses.replace(self, lemmas=lemmas)

    def before(self, name: str) -> "TheoryContext":
        """The context in which lemma ``name`` is proved: later lemmas (and itself) unproved."""
        idx = self.lemma_index(name)
        lemmas = tuple(l if i < idx else dataclasses.replace(l, proved=False) for i, l in enumerate(self.lemmas))
        return dataclasses.replace(self, lemmas=lemmas)

    def is_constructor(self, symbol: str) -> bool:
        return symbol in self.constructors

    def is_function(self, symbol: str) -> bool:
        return symbol in self.functions

    def datatype_of(self, sort: str) -> DatatypeDef:
        return self.datatypes[sort]

    def term(self, text: str, sorts: Optional[Mapping[str, str]] = None, sort: Optional[str] = None) -> Term:
        """Elaborate a standalone term; ``sorts`` pins variable sorts where inference cannot."""
        raw = parse_term_text(text)
        env = _SortEnv(self, dict(sorts or {}), allow_schematic=True)
        env.infer(raw, sort)
        env.finish(0)
        return env.build(raw)

    def equation(self, text: str) -> Equation:
        raw = parse_equation_text(text)
        env = _SortEnv(self, {}, allow_schematic=True)
        env.equation(raw)
        env.finish(0)
        return Equation(env.build(raw.lhs), env.build(raw.rhs))

    def goal(self, text: str) -> SequentGoal:
        premises, conclusion = parse_goal_text(text)
        return _elaborate_goal(self, premises, conclusion, 0, allow_schematic=True)


def load_theory(path) -> TheoryContext:
    path = Path(path)
    return elaborate(parse_theory(path.read_text(encoding="utf-8")), name=path.stem)


def elaborate(theory: TheoryFile, name: str = "Theory") -> TheoryContext:
    datatypes: dict[str, DatatypeDef] = {}
    constructors: dict[str, Constructor] = {}
    functions: dict[str, FunctionDef] = {}
    lemmas: list[Lemma] = []
    strategies: dict[str, StrategyExpr] = dict(BUILTIN_STRATEGIES)
    ctx = TheoryContext(name, datatypes, constructors, functions, (), strategies)
    symbols_seen: set[str] = set()
    lemma_names: set[str] = set()

    for item in theory.items:
        if isinstance(item, RawDatatype):
            if item.name in datatypes:
                raise ElaborationError(f"duplicate datatype {item.name!r}", item.line)
            ctors = []
            for cname, arg_sorts in item.constructors:
                if cname in symbols_seen:
                    raise ElaborationError(f"duplicate symbol {cname!r}", item.line)
                for s in arg_sorts:
                    if s != item.name and s not in datatypes:
                        raise ElaborationError(f"unknown sort {s!r}", item.line)
                symbols_seen.add(cname)
                ctors.append(Constructor(cname, arg_sorts, item.name))
            if all(c.recursive_args for c in ctors):
                raise ElaborationError(f"datatype {item.name!r} has no non-recursive constructor", item.line)
            datatypes[item.name] = DatatypeDef(item.name, tuple(ctors))
            for c in ctors:
                constructors[c.name] = c
        elif isinstance(item, RawFun):
            if item.name in symbols_seen:
                raise ElaborationError(f"duplicate symbol {item.name!r}", item.line)
            for s in item.arg_sorts + (item.result_sort,):
                if s not in datatypes:
                    raise ElaborationError(f"unknown sort {s!r}", item.line)
            symbols_seen.add(item.name)
            functions[item.name] = _elaborate_fun(ctx, item)
        elif isinstance(item, RawLemma):
            if item.name in lemma_names:
                raise ElaborationError(f"duplicate lemma {item.name!r}", item.line)
            if item.strategy is not None and item.strategy not in strategies:
                raise ElaborationError(f"unknown strategy {item.strategy!r}", item.line)
            lemma_names.add(item.name)
            goal = _elaborate_goal(ctx, item.premises, item.conclusion, item.line)
            lemmas.append(Lemma(item.name, goal, item.strategy, False))
        elif isinstance(item, RawStrategy):
            trial = dict(strategies)
            trial[item.name] = item.expr
            try:
                check_references(trial)
            except StrategyError as e:
                raise ElaborationError(str(e), item.line) from None
            strategies[item.name] = item.expr
    return dataclasses.replace(ctx, lemmas=tuple(lemmas))


class _SortEnv:
    """Sort inference for one scope (a defining equation or a lemma goal)."""

    def __init__(
        self,
        ctx: TheoryContext,
        pinned: dict[str, str],
        allow_fun: Optional[RawFun] = None,
        allow_schematic: bool = False,
    ):
        self.ctx = ctx
        self.allow_schematic = allow_schematic
        self.sorts: dict[str, Optional[str]] = dict(pinned)
        self.allow_fun = allow_fun
        self.pending: list[tuple[str, str]] = []  # (var, var) sort equalities

    def signature(self, symbol: str, line: int):
        if symbol in self.ctx.constructors:
            c = self.ctx.constructors[symbol]
            return c.arg_sorts, c.sort
        if symbol in self.ctx.functions:
            f = self.ctx.functions[symbol]
            return f.arg_sorts, f.result_sort
        if self.allow_fun is not None and symbol == self.allow_fun.name:
            return self.allow_fun.arg_sorts, self.allow_fun.result_sort
        return None

    def is_symbol(self, name: str) -> bool:
        return self.signature(name, 0) is not None

    def infer(self, t: RawTerm, expected: Optional[str]) -> Optional[str]:
        sig = self.signature(t.head, t.line)
        if sig is None:
            if t.args:
                raise ElaborationError(f"unknown symbol {t.head!r}", t.line)
            return self._var(t, expected)
        arg_sorts, result = sig
        if len(t.args) != len(arg_sorts):
            raise ElaborationError(
                f"arity mismatch: {t.head!r} expects {len(arg_sorts)} arguments, got {len(t.args)}", t.line
            )
        for a, s in zip(t.args, arg_sorts):
            self.infer(a, s)
        if expected is not None and expected != result:
            raise ElaborationError(f"sort mismatch: {t.head!r} has sort {result}, expected {expected}", t.line)
        return result

    def _var(self, t: RawTerm, expected: Optional[str]) -> Optional[str]:
        if t.head.startswith("?") and not self.allow_schematic:
            raise ElaborationError(f"schematic variable {t.head!r} not allowed here", t.line)
        known = self.sorts.get(t.head)
        if expected is None:
            self.sorts.setdefault(t.head, None)
            return known
        if known is not None and known != expected:
            raise ElaborationError(f"sort mismatch for variable {t.head!r}: {known} vs {expected}", t.line)
        self.sorts[t.head] = expected
        return expected

    def equation(self, eq: RawEquation, line: int = 0) -> None:
        ls = self.infer(eq.lhs, None)
        rs = self.infer(eq.rhs, ls)
        if ls is None and rs is not None:
            self.infer(eq.lhs, rs)
        elif ls is None and rs is None:
            # both sides bare variables; resolved after the whole scope is seen
            self.pending.append((eq.lhs.head, eq.rhs.head))

    def finish(self, line: int) -> None:
        changed = True
        while changed and self.pending:
            changed = False
            for a, b in list(self.pending):
                sa, sb = self.sorts.get(a), self.sorts.get(b)
                if sa is not None and sb is not None:
                    if sa != sb:
                        raise ElaborationError(f"sort mismatch between {a!r} and {b!r}", line)
                    self.pending.remove((a, b))
                elif sa is not None or sb is not None:
                    self.sorts[a] = self.sorts[b] = sa or sb
                    self.pending.remove((a, b))
                    changed = True
        for name, sort in self.sorts.items():
            if sort is None:
                raise ElaborationError(f"ambiguous sort for variable {name!r}", line)

    def build(self, t: RawTerm) -> Term:
        sig = self.signature(t.head, t.line)
        if sig is None:
            return Var(t.head, self.sorts[t.head])
        return App(t.head, tuple(self.build(a) for a in t.args), sig[1])


def _elaborate_goal(ctx: TheoryContext, premises, conclusion, line: int, allow_schematic=False) -> SequentGoal:
    env = _SortEnv(ctx, {}, allow_schematic=allow_schematic)
    for eq in premises + (conclusion,):
        env.equation(eq, line)
    env.finish(line)
    eqs = [Equation(env.build(e.lhs), env.build(e.rhs)) for e in premises]
    return SequentGoal(tuple(eqs), Equation(env.build(conclusion.lhs), env.build(conclusion.rhs)))


def _elaborate_fun(ctx: TheoryContext, raw: RawFun) -> FunctionDef:
    equations = []
    for req in raw.equations:
        env = _SortEnv(ctx, {}, allow_fun=raw)
        if req.lhs.head != raw.name:
            raise ElaborationError(f"defining equation of {raw.name!r} must start with {raw.name!r}", req.lhs.line)
        env.infer(req.lhs, raw.result_sort)
        env.infer(req.rhs, raw.result_sort)
        env.finish(req.lhs.line)
        lhs, rhs = env.build(req.lhs), env.build(req.rhs)
        _check_pattern(ctx, raw.name, lhs, req.lhs.line)
        lhs_vars = set(iter_vars(lhs))
        for v in iter_vars(rhs):
            if v not in lhs_vars:
                raise ElaborationError(f"unbound variable {v.name!r} in definition of {raw.name!r}", req.lhs.line)
        equations.append(Equation(lhs, rhs))

    for i in range(len(equations)):
        for j in range(i + 1, len(equations)):
            if _patterns_overlap(equations[i].lhs, equations[j].lhs):
                raise ElaborationError(
                    f"overlapping patterns in {raw.name!r}: equations {i + 1} and {j + 1}", raw.line
                )
    positions = _recursion_positions(raw.name, len(raw.arg_sorts), equations, raw.line)
    return FunctionDef(raw.name, raw.arg_sorts, raw.result_sort, tuple(equations), positions)


def _check_pattern(ctx: TheoryContext, fname: str, lhs: Term, line: int) -> None:
    seen: set[Var] = set()

    def walk(t: Term, top: bool) -> None:
        if type(t) is Var:
            if t in seen:
                raise ElaborationError(f"repeated pattern variable {t.name!r} in {fname!r}", line)
            seen.add(t)
            return
        if not top and t.symbol not in ctx.constructors:
            raise ElaborationError(f"non-constructor {t.symbol!r} in pattern of {fname!r}", line)
        for a in t.args:
            walk(a, False)

    walk(lhs, True)


def _patterns_overlap(p: Term, q: Term) -> bool:
    if type(p) is Var or type(q) is Var:
        return True
    if p.symbol != q.symbol:
        return False
    return all(_patterns_overlap(a, b) for a, b in zip(p.args, q.args))


def _is_strict_subterm(s: Term, t: Term) -> bool:
    return s != t and any(sub == s for _, sub in subterms(t))


def _recursion_positions(fname: str, arity: int, equations, line: int) -> frozenset[int]:
    calls = []  # (pattern args, call args)
    for eq in equations:
        for _, t in subterms(eq.rhs):
            if type(t) is App and t.symbol == fname:
                calls.append((eq.lhs.args, t.args))
    if not calls:
        # non-recursive: the positions it pattern-matches on
        return frozenset(
            i + 1 for i in range(arity) if any(type(eq.lhs.args[i]) is App for eq in equations)
        )
    positions = frozenset(
        i + 1 for i in range(arity) if all(_is_strict_subterm(args[i], pats[i]) for pats, args in calls)
    )
    if not positions:
        raise ElaborationError(f"non-structural recursion in {fname!r}", line)
    return positions


def recursion_load(ctx: TheoryContext, t: Term) -> int:
    """Sum of the sizes of recursion-position arguments over defined-function occurrences."""
    total = 0
    for _, sub in subterms(t):
        if type(sub) is App and sub.symbol in ctx.functions:
            for p in ctx.functions[sub.symbol].recursion_positions:
                total += term_size(sub.args[p - 1])
    return total

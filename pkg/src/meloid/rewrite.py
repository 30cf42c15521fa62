"""Rewriting: rule orientation, simp sets, budgeted innermost normalization, ground evaluation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from meloid.core.terms import (
    App,
    Equation,
    Position,
    Term,
    Var,
    _match,
    apply_subst,
    iter_vars,
    pretty_term,
    replace_at,
    subterm_at,
    term_size,
)
from meloid.core.theory import TheoryContext, recursion_load

UNLIMITED = None
HYPOTHESIS_CAP = 10
TACTIC_BUDGET = 10_000
FEATURE_BUDGET = 200
EVAL_BUDGET = 100_000


@dataclass(frozen=True)
class RuleOrigin:
    """Where a rule comes from.

    ``kind`` is ``def`` (``name`` = function, ``index`` = 1-based equation),
    ``lemma`` (``name`` = lemma, ``reversed`` if oriented right to left),
    ``premise`` or ``ih`` (``index`` = 1-based premise number in the goal).
    """

    kind: str
    name: str = ""
    index: int = 0
    reversed: bool = False

    def __str__(self) -> str:
        if self.kind == "def":
            return f"def:{self.name}:{self.index}"
        if self.kind == "lemma":
            return f"lemma:{self.name}:{'rl' if self.reversed else 'lr'}"
        return f"{self.kind}:{self.index}"

    @classmethod
    def parse(cls, text: str) -> "RuleOrigin":
        parts = text.split(":")
        if parts[0] == "def" and len(parts) == 3:
            return cls("def", parts[1], int(parts[2]))
        if parts[0] == "lemma" and len(parts) == 3 and parts[2] in ("lr", "rl"):
            return cls("lemma", parts[1], 0, parts[2] == "rl")
        if parts[0] in ("premise", "ih") and len(parts) == 2:
            return cls(parts[0], "", int(parts[1]))
        raise ValueError(f"malformed rule origin {text!r}")


@dataclass(frozen=True)
class RewriteRule:
    lhs: Term
    rhs: Term
    origin: RuleOrigin
    instantiable: frozenset[Var]
    cap: Optional[int] = UNLIMITED

    def __post_init__(self):
        if type(self.lhs) is Var and self.lhs in self.instantiable:
            raise ValueError("rule left-hand side is an instantiable variable")
        if self.lhs.sort != self.rhs.sort:
            raise ValueError("rule sides have different sorts")
        lhs_vars = set(iter_vars(self.lhs))
        if any(v in self.instantiable and v not in lhs_vars for v in iter_vars(self.rhs)):
            raise ValueError("rule right-hand side has unbound variables")


class Rejected(Exception):
    """Raised when an equation cannot be oriented into a terminating rule."""


def orientation(ctx: TheoryContext, eq: Equation) -> Optional[bool]:
    """``False`` for left-to-right, ``True`` for right-to-left, ``None`` if unorientable."""
    for reverse in (False, True):
        lhs, rhs = (eq.rhs, eq.lhs) if reverse else (eq.lhs, eq.rhs)
        if type(lhs) is Var or not set(iter_vars(rhs)) <= set(iter_vars(lhs)):
            continue
        ls, rs = term_size(lhs), term_size(rhs)
        if rs < ls or (rs == ls and recursion_load(ctx, rhs) < recursion_load(ctx, lhs)):
            return reverse
    return None


def orient_equation(ctx: TheoryContext, eq: Equation, name: str = "") -> RewriteRule:
    reverse = orientation(ctx, eq)
    if reverse is None:
        raise Rejected(f"cannot orient {eq}")
    lhs, rhs = (eq.rhs, eq.lhs) if reverse else (eq.lhs, eq.rhs)
    return RewriteRule(lhs, rhs, RuleOrigin("lemma", name, 0, reverse), frozenset(iter_vars(lhs)))


def hypothesis_rule(eq: Equation, kind: str, index: int) -> Optional[RewriteRule]:
    """A premise used as stated; ``None`` when it cannot serve as a rule."""
    schematic = frozenset(v for v in iter_vars(eq.lhs) if v.is_schematic)
    if type(eq.lhs) is Var and eq.lhs.is_schematic:
        return None
    if any(v.is_schematic and v not in schematic for v in iter_vars(eq.rhs)):
        return None
    if eq.lhs == eq.rhs:
        return None
    return RewriteRule(eq.lhs, eq.rhs, RuleOrigin(kind, "", index), schematic, HYPOTHESIS_CAP)


class SimpSet:
    """Ordered rewrite rules, indexed by the head symbol of their left-hand side."""

    def __init__(self, rules: Iterable[RewriteRule] = ()):
        self.rules: list[RewriteRule] = []
        self._by_head: dict[str, list[RewriteRule]] = {}
        self._var_rules: list[RewriteRule] = []
        self._seen: set[tuple[Term, Term]] = set()
        for r in rules:
            self.add(r)

    def add(self, rule: RewriteRule) -> None:
        key = (rule.lhs, rule.rhs)
        if key in self._seen:
            return
        self._seen.add(key)
        self.rules.append(rule)
        if type(rule.lhs) is Var:
            self._var_rules.append(rule)
        else:
            self._by_head.setdefault(rule.lhs.symbol, []).append(rule)

    def extended(self, rules: Iterable[RewriteRule]) -> "SimpSet":
        s = SimpSet(self.rules)
        for r in rules:
            s.add(r)
        return s

    def candidates(self, t: Term) -> list[RewriteRule]:
        if type(t) is Var:
            return self._var_rules
        return self._by_head.get(t.symbol, [])

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)


def definition_rules(ctx: TheoryContext) -> list[RewriteRule]:
    rules = []
    for f in ctx.functions.values():
        for i, eq in enumerate(f.equations, 1):
            rules.append(RewriteRule(eq.lhs, eq.rhs, RuleOrigin("def", f.name, i), frozenset(iter_vars(eq.lhs))))
    return rules


def lemma_rules(ctx: TheoryContext) -> list[RewriteRule]:
    rules = []
    for lem in ctx.proved_lemmas:
        if lem.goal.premises:
            continue
        try:
            rules.append(orient_equation(ctx, lem.goal.conclusion, lem.name))
        except Rejected:
            pass
    return rules


def definitional_simpset(ctx: TheoryContext) -> SimpSet:
    return _cached_simpset(ctx, False)


def context_simpset(ctx: TheoryContext) -> SimpSet:
    """Definitions followed by every proved, orientable lemma in proof order."""
    return _cached_simpset(ctx, True)


_SIMPSET_CACHE: dict = {}


def _cached_simpset(ctx: TheoryContext, with_lemmas: bool) -> SimpSet:
    key = (id(ctx.functions), tuple(l.name for l in ctx.proved_lemmas) if with_lemmas else None)
    hit = _SIMPSET_CACHE.get(key)
    if hit is not None and hit[0] is ctx.functions:
        return hit[1]
    rules = definition_rules(ctx)
    if with_lemmas:
        rules += lemma_rules(ctx)
    simpset = SimpSet(rules)
    if len(_SIMPSET_CACHE) > 256:
        _SIMPSET_CACHE.clear()
    _SIMPSET_CACHE[key] = (ctx.functions, simpset)
    return simpset


@dataclass(frozen=True)
class Step:
    origin: RuleOrigin
    position: Position
    subst: tuple[tuple[Var, Term], ...]

    def __str__(self) -> str:
        path = ".".join(map(str, self.position)) if self.position else "root"
        binds = ",".join(f"{v.name}={pretty_term(t)}" for v, t in self.subst)
        return f"{self.origin} @ {path} with {{{binds}}}"


Trace = tuple[Step, ...]


@dataclass
class Normalization:
    term: Term
    trace: Trace
    exhausted: bool


class _Run:
    def __init__(self, simpset: SimpSet, budget: int, usage: dict, rightmost: bool):
        self.simpset = simpset
        self.budget = budget
        self.usage = usage
        self.rightmost = rightmost
        self.steps: list[Step] = []
        self.exhausted = False

    def norm(self, t: Term, pos: Position) -> Term:
        while True:
            if self.exhausted:
                return t
            if type(t) is App and t.args:
                args = list(t.args)
                order = range(len(args) - 1, -1, -1) if self.rightmost else range(len(args))
                changed = False
                for i in order:
                    new = self.norm(args[i], pos + (i + 1,))
                    if new is not args[i]:
                        args[i] = new
                        changed = True
                    if self.exhausted:
                        break
                if changed:
                    t = App(t.symbol, tuple(args), t.sort)
                if self.exhausted:
                    return t
            rewritten = self.rewrite_root(t, pos)
            if rewritten is None:
                return t
            t = rewritten

    def rewrite_root(self, t: Term, pos: Position) -> Optional[Term]:
        for rule in self.simpset.candidates(t):
            if rule.cap is not None and self.usage.get(rule.origin, 0) >= rule.cap:
                continue
            subst: dict = {}
            if not _match(rule.lhs, t, rule.instantiable, subst):
                continue
            if len(self.steps) >= self.budget:
                self.exhausted = True
                return None
            if rule.cap is not None:
                self.usage[rule.origin] = self.usage.get(rule.origin, 0) + 1
            ordered = tuple(sorted(subst.items(), key=lambda kv: kv[0].name))
            self.steps.append(Step(rule.origin, pos, ordered))
            return apply_subst(subst, rule.rhs)
        return None


def normalize(
    simpset: SimpSet,
    term: Term,
    budget: int = TACTIC_BUDGET,
    usage: Optional[dict] = None,
    rightmost: bool = False,
) -> Normalization:
    """Innermost normalization, leftmost by default.

    ``usage`` counts applications of capped rules and may be shared across
    calls so that a cap applies per goal rather than per term.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    run = _Run(simpset, budget, usage if usage is not None else {}, rightmost)
    result = run.norm(term, ())
    return Normalization(result, tuple(run.steps), run.exhausted)


class ReplayError(Exception):
    pass


def apply_step(rules: Mapping[RuleOrigin, tuple[Term, Term, frozenset]], term: Term, step: Step) -> Term:
    """Check that ``step`` is a legal rule instance on ``term`` and perform it."""
    if step.origin not in rules:
        raise ReplayError(f"rule {step.origin} is not available")
    lhs, rhs, inst = rules[step.origin]
    subst = dict(step.subst)
    if any(v not in inst for v in subst):
        raise ReplayError(f"substitution binds non-instantiable variables for {step.origin}")
    if any(v.sort != t.sort for v, t in subst.items()):
        raise ReplayError("substitution is not sort-preserving")
    try:
        redex = subterm_at(term, step.position)
    except IndexError:
        raise ReplayError(f"position {step.position} does not exist") from None
    if apply_subst(subst, lhs) != redex:
        raise ReplayError(f"{step.origin} does not match at {'.'.join(map(str, step.position)) or 'root'}")
    if any(v in inst and v not in subst for v in iter_vars(rhs)):
        raise ReplayError(f"unbound rule variable left after {step.origin}")
    result = apply_subst(subst, rhs)
    return replace_at(term, step.position, result)


def replay_steps(rules, term: Term, steps: Sequence[Step]) -> Term:
    for i, step in enumerate(steps):
        try:
            term = apply_step(rules, term, step)
        except ReplayError as e:
            raise ReplayError(f"step {i + 1}: {e}") from None
    return term


def rule_table(rules: Iterable[RewriteRule]) -> dict[RuleOrigin, tuple[Term, Term, frozenset]]:
    return {r.origin: (r.lhs, r.rhs, r.instantiable) for r in rules}


_STEP_RE = re.compile(r"^(?P<origin>\S+) @ (?P<path>\S+) with \{(?P<binds>.*)\}$")


def parse_step(line: str, parse_term, var_sorts: Mapping[str, str]) -> Step:
    """Inverse of ``str(step)``; ``parse_term(text, sorts)`` elaborates bound terms."""
    m = _STEP_RE.match(line.strip())
    if m is None:
        raise ValueError(f"malformed trace step: {line!r}")
    origin = RuleOrigin.parse(m.group("origin"))
    path = () if m.group("path") == "root" else tuple(int(p) for p in m.group("path").split("."))
    binds = []
    text = m.group("binds")
    for chunk in _split_binds(text):
        name, _, term_text = chunk.partition("=")
        sort = var_sorts.get(name)
        if sort is None:
            raise ValueError(f"unknown variable {name!r} in trace step")
        term = parse_term(term_text, sort)
        binds.append((Var(name, sort), term))
    return Step(origin, path, tuple(binds))


def _split_binds(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    if cur:
        parts.append("".join(cur))
    return [p for p in parts if p]


class Stuck(Exception):
    def __init__(self, budget: bool = False):
        super().__init__()
        self.budget = budget


class GroundEvaluator:
    """Call-by-value evaluation of ground terms with the defining equations.

    Reaches the same normal form as leftmost-innermost normalization with the
    definitional simp set (patterns never overlap), but memoises every
    evaluated subterm, so repeated queries are cheap.
    """

    def __init__(self, ctx: TheoryContext, budget: int = EVAL_BUDGET):
        self.ctx = ctx
        self.budget = budget
        self.cache: dict[Term, Optional[Term]] = {}
        self._eqs = {name: f.equations for name, f in ctx.functions.items()}
        self._steps = 0

    def __call__(self, term: Term) -> Optional[Term]:
        """The constructor normal form of ``term``, or ``None`` if stuck."""
        self._steps = 0
        try:
            return self._eval(term)
        except Stuck:
            return None

    def _eval(self, t: Term) -> Term:
        if type(t) is Var:
            raise ValueError(f"eval_ground on non-ground term (variable {t.name})")
        hit = self.cache.get(t, _MISSING)
        if hit is not _MISSING:
            if hit is None:
                raise Stuck()
            return hit
        try:
            args = tuple(self._eval(a) for a in t.args)
            if t.symbol in self.ctx.constructors:
                value = t if args == t.args else App(t.symbol, args, t.sort)
            else:
                value = self._apply(t.symbol, args, t.sort)
        except Stuck as e:
            if not e.budget:
                self.cache[t] = None
            raise
        self.cache[t] = value
        return value

    def _apply(self, fname: str, args: tuple[Term, ...], sort: str) -> Term:
        call = App(fname, args, sort)
        for eq in self._eqs[fname]:
            subst: dict = {}
            if _match(eq.lhs, call, _ANY, subst):
                self._steps += 1
                if self._steps > self.budget:
                    raise Stuck(budget=True)
                return self._eval(apply_subst(subst, eq.rhs))
        raise Stuck()


class _AnyVar:
    def __contains__(self, item) -> bool:
        return True


_ANY = _AnyVar()
_MISSING = object()


def eval_ground(ctx: TheoryContext, term: Term, budget: int = EVAL_BUDGET) -> Optional[Term]:
    """Constructor normal form of a ground term, or ``None`` when evaluation is stuck."""
    return GroundEvaluator(ctx, budget)(term)


def is_constructor_term(ctx: TheoryContext, t: Term) -> bool:
    return type(t) is App and t.symbol in ctx.constructors and all(is_constructor_term(ctx, a) for a in t.args)

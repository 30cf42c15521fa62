"""First-order terms, equations, sequent goals, matching and substitution.

Schematic variables (instantiable while rewriting with a premise) are
ordinary :class:`Var` values whose name starts with ``?``; they can never
collide with user identifiers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Union

Position = tuple[int, ...]  # 1-based argument indices from the root


@dataclass(frozen=True, slots=True, eq=False)
class Var:
    name: str
    sort: str
    _hash: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("V", self.name, self.sort)))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return self is other or (
            type(other) is Var and self._hash == other._hash and self.name == other.name and self.sort == other.sort
        )

    def __repr__(self) -> str:
        return self.name

    @property
    def is_schematic(self) -> bool:
        return self.name.startswith("?")


@dataclass(frozen=True, slots=True, eq=False)
class App:
    symbol: str
    args: tuple["Term", ...]
    sort: str
    _hash: int = field(init=False, repr=False)
    _size: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("A", self.symbol, self.args)))
        object.__setattr__(self, "_size", 1 + sum(term_size(a) for a in self.args))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return self is other or (
            type(other) is App
            and self._hash == other._hash
            and self.symbol == other.symbol
            and self.sort == other.sort
            and self.args == other.args
        )

    def __repr__(self) -> str:
        return pretty_term(self)


Term = Union[Var, App]
Substitution = Mapping[Var, Term]


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if self.lhs.sort != self.rhs.sort:
            raise ValueError(f"sort mismatch in equation: {self.lhs.sort} vs {self.rhs.sort}")

    @property
    def sort(self) -> str:
        return self.lhs.sort

    def __repr__(self) -> str:
        return pretty_equation(self)


@dataclass(frozen=True)
class SequentGoal:
    """``premises ==> conclusion``; premises listed in ``ih_indices`` are induction hypotheses."""

    premises: tuple[Equation, ...]
    conclusion: Equation
    ih_indices: frozenset[int] = frozenset()

    def __post_init__(self):
        for v in free_vars(self.conclusion):
            if v.is_schematic:
                raise ValueError(f"schematic variable {v.name} in conclusion")

    @property
    def fixed_vars(self) -> tuple[Var, ...]:
        return tuple(v for v in goal_vars(self) if not v.is_schematic)

    @property
    def schematic_vars(self) -> tuple[Var, ...]:
        return tuple(v for v in goal_vars(self) if v.is_schematic)

    def is_ih(self, index: int) -> bool:
        return index in self.ih_indices

    @property
    def hypotheses(self) -> tuple[Equation, ...]:
        return tuple(p for i, p in enumerate(self.premises) if i in self.ih_indices)

    def __repr__(self) -> str:
        return pretty_goal(self)


def is_var(t: Term) -> bool:
    return type(t) is Var


def term_size(t: Term) -> int:
    return 1 if type(t) is Var else t._size


def equation_size(eq: Equation) -> int:
    return term_size(eq.lhs) + term_size(eq.rhs)


def goal_size(goal: SequentGoal) -> int:
    return sum(equation_size(p) for p in goal.premises) + equation_size(goal.conclusion)


def iter_vars(t: Term) -> Iterator[Var]:
    """Variable occurrences, left to right, with repetitions."""
    if type(t) is Var:
        yield t
    else:
        for a in t.args:
            yield from iter_vars(a)


def _unique(items: Iterable[Var]) -> tuple[Var, ...]:
    return tuple(dict.fromkeys(items))


def term_vars(t: Term) -> tuple[Var, ...]:
    return _unique(iter_vars(t))


def equation_vars(eq: Equation) -> tuple[Var, ...]:
    return _unique(v for side in (eq.lhs, eq.rhs) for v in iter_vars(side))


def goal_vars(goal: SequentGoal) -> tuple[Var, ...]:
    """Variables in first-occurrence order: conclusion first, then premises."""
    eqs = (goal.conclusion,) + goal.premises
    return _unique(v for eq in eqs for side in (eq.lhs, eq.rhs) for v in iter_vars(side))


def free_vars(x: Union[Term, Equation, SequentGoal]) -> frozenset[Var]:
    if isinstance(x, SequentGoal):
        return frozenset(goal_vars(x))
    if isinstance(x, Equation):
        return frozenset(equation_vars(x))
    return frozenset(iter_vars(x))


def subterms(t: Term, pos: Position = ()) -> Iterator[tuple[Position, Term]]:
    """Pre-order (outermost first, left to right) traversal with positions."""
    yield pos, t
    if type(t) is App:
        for i, a in enumerate(t.args, 1):
            yield from subterms(a, pos + (i,))


def subterm_at(t: Term, pos: Position) -> Term:
    for i in pos:
        if type(t) is not App or not 1 <= i <= len(t.args):
            raise IndexError(f"invalid position {pos}")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        if new.sort != t.sort:
            raise ValueError("replacement changes sort")
        return new
    if type(t) is not App or not 1 <= pos[0] <= len(t.args):
        raise IndexError(f"invalid position {pos}")
    i = pos[0] - 1
    args = t.args[:i] + (replace_at(t.args[i], pos[1:], new),) + t.args[i + 1 :]
    return App(t.symbol, args, t.sort)


def symbols(t: Term) -> Iterator[str]:
    if type(t) is App:
        yield t.symbol
        for a in t.args:
            yield from symbols(a)


def match(pattern: Term, subject: Term, instantiable: Iterable[Var]) -> Optional[dict[Var, Term]]:
    """First-order matching: the unique ``s`` with dom(s) in ``instantiable`` and s(pattern) == subject."""
    inst = instantiable if isinstance(instantiable, (set, frozenset)) else frozenset(instantiable)
    subst: dict[Var, Term] = {}
    return subst if _match(pattern, subject, inst, subst) else None


def _match(p: Term, s: Term, inst, subst: dict) -> bool:
    if type(p) is Var:
        if p not in inst:
            return p == s
        if p.sort != s.sort:
            return False
        bound = subst.get(p)
        if bound is None:
            subst[p] = s
            return True
        return bound == s
    if type(s) is not App or s.symbol != p.symbol or len(s.args) != len(p.args):
        return False
    for pa, sa in zip(p.args, s.args):
        if not _match(pa, sa, inst, subst):
            return False
    return True


def apply_subst(subst: Substitution, t: Term) -> Term:
    if not subst:
        return t
    if type(t) is Var:
        return subst.get(t, t)
    new_args = tuple(apply_subst(subst, a) for a in t.args)
    if all(n is o for n, o in zip(new_args, t.args)):
        return t
    return App(t.symbol, new_args, t.sort)


def subst_equation(subst: Substitution, eq: Equation) -> Equation:
    return Equation(apply_subst(subst, eq.lhs), apply_subst(subst, eq.rhs))


def compose(outer: Substitution, inner: Substitution) -> dict[Var, Term]:
    """``compose(s, t)`` behaves as applying ``t`` then ``s``."""
    result = {v: apply_subst(outer, t) for v, t in inner.items()}
    for v, t in outer.items():
        result.setdefault(v, t)
    return {v: t for v, t in result.items() if t != v}


def rename_equation_canonically(eq: Equation, prefix: str = "v") -> Equation:
    """Rename variables to ``v1, v2, ...`` in first-occurrence order."""
    renaming = {v: Var(f"{prefix}{i}", v.sort) for i, v in enumerate(equation_vars(eq), 1)}
    return subst_equation(renaming, eq)


def alpha_equivalent(a: Equation, b: Equation) -> bool:
    return rename_equation_canonically(a) == rename_equation_canonically(b)


def goals_alpha_equivalent(a: SequentGoal, b: SequentGoal) -> bool:
    if len(a.premises) != len(b.premises):
        return False
    va, vb = goal_vars(a), goal_vars(b)
    if len(va) != len(vb) or any(x.sort != y.sort or x.is_schematic != y.is_schematic for x, y in zip(va, vb)):
        return False
    ra = {v: Var(f"_{i}", v.sort) for i, v in enumerate(va)}
    rb = {v: Var(f"_{i}", v.sort) for i, v in enumerate(vb)}
    eqs_a = [subst_equation(ra, e) for e in (a.conclusion,) + a.premises]
    eqs_b = [subst_equation(rb, e) for e in (b.conclusion,) + b.premises]
    return eqs_a == eqs_b


def fresh_name(base: str, taken: set[str]) -> str:
    """``base`` itself if free, otherwise ``base1``, ``base2``, ...; records the result in ``taken``."""
    name, i = base, 0
    while name in taken:
        i += 1
        name = f"{base}{i}"
    taken.add(name)
    return name


def pretty_term(t: Term, nested: bool = False) -> str:
    if type(t) is Var:
        return t.name
    if not t.args:
        return t.symbol
    body = " ".join([t.symbol] + [pretty_term(a, True) for a in t.args])
    return f"({body})" if nested else body


def pretty_equation(eq: Equation) -> str:
    return f"{pretty_term(eq.lhs)} = {pretty_term(eq.rhs)}"


def pretty_goal(goal: SequentGoal) -> str:
    parts = [pretty_equation(p) for p in goal.premises] + [pretty_equation(goal.conclusion)]
    return " ==> ".join(parts)

"""Strategy expressions and their concrete syntax.

    s ::= NAME | "Thens" "[" s ("," s)* "]" | "Ors" "[" s ("," s)* "]"
        | "Repeat" "(" s ")" | "Dynamic" "(" "Induct" ")"
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from meloid.core.lexer import ParseError, TokenStream

ATOMIC_NAMES = ("Auto", "Fastforce", "IsSolved", "Quickcheck", "Conjecture")


@dataclass(frozen=True)
class Atomic:
    name: str


@dataclass(frozen=True)
class DynamicInduct:
    pass


@dataclass(frozen=True)
class Thens:
    steps: tuple["StrategyExpr", ...]


@dataclass(frozen=True)
class Ors:
    alternatives: tuple["StrategyExpr", ...]


@dataclass(frozen=True)
class Repeat:
    body: "StrategyExpr"


@dataclass(frozen=True)
class Ref:
    name: str


StrategyExpr = Union[Atomic, DynamicInduct, Thens, Ors, Repeat, Ref]


class StrategyError(Exception):
    pass


def parse_strategy(text: str) -> StrategyExpr:
    ts = TokenStream.from_text(text)
    expr = parse_strategy_tokens(ts)
    if not ts.at_eof():
        raise ts.error("unexpected trailing input", ("end of input",))
    return expr


def parse_strategy_tokens(ts: TokenStream) -> StrategyExpr:
    if ts.at("Thens") or ts.at("Ors"):
        keyword = ts.next().text
        ts.expect("[")
        items = [parse_strategy_tokens(ts)]
        while ts.at(","):
            ts.next()
            items.append(parse_strategy_tokens(ts))
        if not ts.at("]"):
            raise ts.error("syntax error", ("','", "']'"))
        ts.next()
        return Thens(tuple(items)) if keyword == "Thens" else Ors(tuple(items))
    if ts.at("Repeat"):
        ts.next()
        ts.expect("(")
        body = parse_strategy_tokens(ts)
        _close(ts)
        return Repeat(body)
    if ts.at("Dynamic"):
        ts.next()
        ts.expect("(")
        if not ts.at("Induct"):
            raise ts.error("syntax error", ("'Induct'",))
        ts.next()
        _close(ts)
        return DynamicInduct()
    name = ts.expect_name()
    if name in ATOMIC_NAMES:
        return Atomic(name)
    return Ref(name)


def _close(ts: TokenStream) -> None:
    if not ts.at(")"):
        tok = ts.peek()
        raise ParseError("unbalanced parentheses", tok.line, tok.column, ("')'",))
    ts.next()


def pretty_strategy(expr: StrategyExpr) -> str:
    if isinstance(expr, Atomic):
        return expr.name
    if isinstance(expr, Ref):
        return expr.name
    if isinstance(expr, DynamicInduct):
        return "Dynamic (Induct)"
    if isinstance(expr, Repeat):
        return f"Repeat ({pretty_strategy(expr.body)})"
    if isinstance(expr, Thens):
        return "Thens [" + ", ".join(pretty_strategy(s) for s in expr.steps) + "]"
    return "Ors [" + ", ".join(pretty_strategy(s) for s in expr.alternatives) + "]"


def check_references(table: Mapping[str, StrategyExpr]) -> None:
    """Every Ref resolves and no strategy refers to itself, directly or not."""

    def refs(expr):
        if isinstance(expr, Ref):
            yield expr.name
        elif isinstance(expr, Thens):
            for s in expr.steps:
                yield from refs(s)
        elif isinstance(expr, Ors):
            for s in expr.alternatives:
                yield from refs(s)
        elif isinstance(expr, Repeat):
            yield from refs(expr.body)

    state: dict[str, int] = {}

    def visit(name, chain):
        if state.get(name) == 2:
            return
        if state.get(name) == 1:
            raise StrategyError("recursive strategy reference: " + " -> ".join(chain + [name]))
        if name not in table:
            raise StrategyError(f"unknown strategy {name!r}")
        state[name] = 1
        for r in refs(table[name]):
            visit(r, chain + [name])
        state[name] = 2

    for name in table:
        visit(name, [])


BUILTIN_STRATEGIES: dict[str, StrategyExpr] = {
    "DInd": parse_strategy("Thens [Dynamic (Induct), Auto, IsSolved]"),
    "CDInd": parse_strategy("Thens [Conjecture, Fastforce, Quickcheck, DInd]"),
}

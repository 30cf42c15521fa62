"""Theory-file parser and pretty-printer.

Grammar (whitespace-insensitive, ``#`` line comments)::

    theory      ::= item*
    item        ::= datatype | fundef | lemma | strategydef
    datatype    ::= "datatype" NAME "=" ctor ("|" ctor)*
    ctor        ::= NAME NAME*
    fundef      ::= "fun" NAME "::" NAME ("->" NAME)+ "where" eqn ("|" eqn)*
    eqn         ::= side "=" side
    side        ::= NAME term* | term
    lemma       ::= "lemma" NAME ":" '"' goal '"' ("by" NAME)?
    goal        ::= (eqn "==>")* eqn
    term        ::= NAME | "(" NAME term* ")"
    strategydef ::= "strategy" NAME "=" strategyexpr

An equation side may drop the outermost parentheses of an application.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from meloid.core.lexer import ParseError, TokenStream
from meloid.strategy.syntax import StrategyExpr, parse_strategy_tokens, pretty_strategy


@dataclass(frozen=True)
class RawTerm:
    head: str
    args: tuple["RawTerm", ...] = ()
    line: int = 0
    column: int = 0

    def __eq__(self, other):
        return isinstance(other, RawTerm) and self.head == other.head and self.args == other.args

    def __hash__(self):
        return hash((self.head, self.args))


@dataclass(frozen=True)
class RawEquation:
    lhs: RawTerm
    rhs: RawTerm


@dataclass(frozen=True)
class RawDatatype:
    name: str
    constructors: tuple[tuple[str, tuple[str, ...]], ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RawFun:
    name: str
    arg_sorts: tuple[str, ...]
    result_sort: str
    equations: tuple[RawEquation, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RawLemma:
    name: str
    premises: tuple[RawEquation, ...]
    conclusion: RawEquation
    strategy: Optional[str] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RawStrategy:
    name: str
    expr: StrategyExpr
    line: int = field(default=0, compare=False)


Item = Union[RawDatatype, RawFun, RawLemma, RawStrategy]


@dataclass(frozen=True)
class TheoryFile:
    items: tuple[Item, ...]


def parse_theory(text: str) -> TheoryFile:
    ts = TokenStream.from_text(text)
    items = []
    while not ts.at_eof():
        tok = ts.peek()
        if ts.at("datatype"):
            items.append(_parse_datatype(ts))
        elif ts.at("fun"):
            items.append(_parse_fun(ts))
        elif ts.at("lemma"):
            items.append(_parse_lemma(ts))
        elif ts.at("strategy"):
            ts.next()
            name = ts.expect_name()
            ts.expect("=")
            items.append(RawStrategy(name, parse_strategy_tokens(ts), tok.line))
        else:
            raise ts.error("syntax error", ("'datatype'", "'fun'", "'lemma'", "'strategy'"))
    return TheoryFile(tuple(items))


def parse_equation_text(text: str) -> RawEquation:
    ts = TokenStream.from_text(text)
    eq = _parse_equation(ts)
    if not ts.at_eof():
        raise ts.error("unexpected trailing input", ("end of input",))
    return eq


def parse_goal_text(text: str) -> tuple[tuple[RawEquation, ...], RawEquation]:
    ts = TokenStream.from_text(text)
    result = _parse_goal(ts)
    if not ts.at_eof():
        raise ts.error("unexpected trailing input", ("'==>'", "end of input"))
    return result


def parse_term_text(text: str) -> RawTerm:
    ts = TokenStream.from_text(text)
    t = _parse_side(ts)
    if not ts.at_eof():
        raise ts.error("unexpected trailing input", ("end of input",))
    return t


def _parse_datatype(ts: TokenStream) -> RawDatatype:
    line = ts.next().line
    name = ts.expect_name()
    ts.expect("=")
    ctors = [_parse_ctor(ts)]
    while ts.at("|"):
        ts.next()
        ctors.append(_parse_ctor(ts))
    return RawDatatype(name, tuple(ctors), line)


def _parse_ctor(ts: TokenStream) -> tuple[str, tuple[str, ...]]:
    name = ts.expect_name()
    sorts = []
    while ts.at_name() and not ts.at("|"):
        sorts.append(ts.next().text)
    return name, tuple(sorts)


def _parse_fun(ts: TokenStream) -> RawFun:
    line = ts.next().line
    name = ts.expect_name()
    ts.expect("::")
    sorts = [ts.expect_name()]
    ts.expect("->")
    sorts.append(ts.expect_name())
    while ts.at("->"):
        ts.next()
        sorts.append(ts.expect_name())
    ts.expect("where")
    eqns = [_parse_equation(ts)]
    while ts.at("|"):
        ts.next()
        eqns.append(_parse_equation(ts))
    return RawFun(name, tuple(sorts[:-1]), sorts[-1], tuple(eqns), line)


def _parse_lemma(ts: TokenStream) -> RawLemma:
    line = ts.next().line
    name = ts.expect_name()
    ts.expect(":")
    ts.expect('"')
    premises, conclusion = _parse_goal(ts)
    if not ts.at('"'):
        raise ts.error("syntax error", ("'==>'", "'\"'"))
    ts.next()
    strategy = None
    if ts.at("by"):
        ts.next()
        strategy = ts.expect_name()
    return RawLemma(name, premises, conclusion, strategy, line)


def _parse_goal(ts: TokenStream):
    eqs = [_parse_equation(ts)]
    while ts.at("==>"):
        ts.next()
        eqs.append(_parse_equation(ts))
    return tuple(eqs[:-1]), eqs[-1]


def _parse_equation(ts: TokenStream) -> RawEquation:
    lhs = _parse_side(ts)
    ts.expect("=")
    rhs = _parse_side(ts)
    return RawEquation(lhs, rhs)


def _parse_side(ts: TokenStream) -> RawTerm:
    if ts.at("("):
        return _parse_term(ts)
    tok = ts.peek()
    head = ts.expect_name()
    args = []
    while ts.at_name() or ts.at("("):
        args.append(_parse_term(ts))
    return RawTerm(head, tuple(args), tok.line, tok.column)


def _parse_term(ts: TokenStream) -> RawTerm:
    tok = ts.peek()
    if ts.at("("):
        ts.next()
        head = ts.expect_name()
        args = []
        while ts.at_name() or ts.at("("):
            args.append(_parse_term(ts))
        if not ts.at(")"):
            close = ts.peek()
            raise ParseError("unbalanced parentheses", close.line, close.column, ("')'", "term"))
        ts.next()
        return RawTerm(head, tuple(args), tok.line, tok.column)
    if ts.at(")"):
        raise ParseError("unbalanced parentheses", tok.line, tok.column, ("term",))
    head = ts.expect_name()
    return RawTerm(head, (), tok.line, tok.column)


def pretty_raw_term(t: RawTerm, nested: bool = False) -> str:
    if not t.args:
        return t.head
    body = " ".join([t.head] + [pretty_raw_term(a, True) for a in t.args])
    return f"({body})" if nested else body


def pretty_raw_equation(eq: RawEquation) -> str:
    return f"{pretty_raw_term(eq.lhs)} = {pretty_raw_term(eq.rhs)}"


def pretty_item(item: Item) -> str:
    if isinstance(item, RawDatatype):
        ctors = " | ".join(" ".join((c,) + sorts) for c, sorts in item.constructors)
        return f"datatype {item.name} = {ctors}"
    if isinstance(item, RawFun):
        sig = " -> ".join(item.arg_sorts + (item.result_sort,))
        eqns = "\n  | ".join(pretty_raw_equation(e) for e in item.equations)
        return f"fun {item.name} :: {sig} where\n    {eqns}"
    if isinstance(item, RawLemma):
        goal = " ==> ".join(pretty_raw_equation(e) for e in item.premises + (item.conclusion,))
        by = f" by {item.strategy}" if item.strategy else ""
        return f'lemma {item.name}: "{goal}"{by}'
    return f"strategy {item.name} = {pretty_strategy(item.expr)}"


def pretty_theory(theory: TheoryFile) -> str:
    return "\n\n".join(pretty_item(i) for i in theory.items) + "\n"

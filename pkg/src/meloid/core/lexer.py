"""Tokenizer shared by the theory-file and strategy parsers."""

from __future__ import annotations

import re
from dataclasses import dataclass

RESERVED_WORDS = frozenset({"datatype", "fun", "where", "lemma", "by", "strategy"})

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<op>==>|::|->|[=|():\[\],"])
  | (?P<name>\??[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


class ParseError(Exception):
    """Syntax error with a 1-based source position."""

    def __init__(self, message: str, line: int, column: int, expected: tuple[str, ...] = ()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        detail = f"{message} at line {line}, column {column}"
        if expected:
            detail += f" (expected {' or '.join(expected)})"
        super().__init__(detail)


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "op" or "eof"
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind in ("name", "op"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @classmethod
    def from_text(cls, text: str) -> "TokenStream":
        return cls(tokenize(text))

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text == text or tok.kind == "name" and tok.text == text

    def at_name(self) -> bool:
        tok = self.peek()
        return tok.kind == "name" and tok.text not in RESERVED_WORDS

    def error(self, message: str, expected: tuple[str, ...] = ()) -> ParseError:
        tok = self.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"{message}, found {found}", tok.line, tok.column, expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error("syntax error", (repr(text),))
        return self.next()

    def expect_name(self) -> str:
        tok = self.peek()
        if tok.kind == "name" and tok.text in RESERVED_WORDS:
            raise ParseError(f"reserved word {tok.text!r} used as identifier", tok.line, tok.column, ("identifier",))
        if tok.kind != "name":
            raise self.error("syntax error", ("identifier",))
        return self.next().text

    def at_eof(self) -> bool:
        return self.peek().kind == "eof"

"""Tiny regex tokenizer and token cursor shared by the model, formula and rule parsers."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .errors import ParseError


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, patterns: Iterable[tuple[str, str]]) -> list[Token]:
    """Split ``text`` into tokens. ``patterns`` is an ordered list of (kind, regex).

    Whitespace and ``#`` comments are skipped. The returned list ends with an
    ``EOF`` token.
    """
    parts = [("WS", r"[ \t\r\n]+"), ("COMMENT", r"#[^\n]*")] + list(patterns)
    master = re.compile("|".join(f"(?P<{k}>{p})" for k, p in parts))
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = master.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        assert kind is not None
        chunk = m.group()
        if kind not in ("WS", "COMMENT"):
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


class Cursor:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            return self.next()
        return None

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = what or (repr(text) if text is not None else kind.lower())
            got = "end of input" if tok.kind == "EOF" else repr(tok.text)
            raise ParseError(f"expected {want}, got {got}", tok.line, tok.col)
        return self.next()

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col)

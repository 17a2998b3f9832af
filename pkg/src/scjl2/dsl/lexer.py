from __future__ import annotations

import re
from dataclasses import dataclass


class DslError(Exception):
    """A diagnostic tied to a source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0, origin: str = "<input>"):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.origin = origin

    def __str__(self):
        return f"{self.origin}:{self.line}:{self.col}: {self.message}"


class LexError(DslError):
    pass


class ParseError(DslError):
    pass


class ResolveError(DslError):
    """Unknown channel, domain, variable, atom or process."""


class ArityError(DslError):
    pass


class DomainDeclError(DslError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "int" | "op" | "eof"
    text: str
    line: int
    col: int


_OPS = [
    "|||", "|~|", "[|", "|]", "||", "[]", "->", "=>", ":=", "..", "!=", "<=", ">=",
    "|", "[", "]", "(", ")", "{", "}", ",", ";", ":", ".", "!", "?", "\\", "&", "@",
    "=", "<", ">", "+", "-",
]
_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>" + "|".join(re.escape(o) for o in _OPS) + ")"
)


def tokenize(text: str, origin: str = "<input>") -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise LexError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, origin)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("int", "ident", "op"):
            out.append(Token(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class TokenStream:
    def __init__(self, tokens: list[Token], origin: str):
        self.toks = tokens
        self.i = 0
        self.origin = origin

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.cur
        return t.kind in ("op", "ident") and t.text == text

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.describe()}")
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.cur.kind != "ident":
            self.fail(f"expected {what}, found {self.describe()}")
        return self.advance()

    def integer(self) -> int:
        neg = self.accept("-")
        if self.cur.kind != "int":
            self.fail(f"expected integer, found {self.describe()}")
        v = int(self.advance().text)
        return -v if neg else v

    def describe(self) -> str:
        t = self.cur
        return "end of input" if t.kind == "eof" else repr(t.text)

    def fail(self, message: str, tok: Token | None = None, cls=ParseError):
        tok = tok or self.cur
        raise cls(message, tok.line, tok.col, self.origin)

"""Tokenizer shared by the type, term, formula and tree readers.

Unicode input is folded onto the ASCII spelling, so ``λx:e. x`` and
``\\x:e. x`` tokenize identically.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError

_UNICODE = {
    "λ": "\\",
    "Λ": "/\\",
    "Π": "Pi",
    "→": "->",
    "∀": "forall",
    "∃": "exists",
    "ε": "eps",
    "τ": "tau",
    "ι": "iota",
    "∧": "/\\",
    "&": "/\\",
    "∨": "\\/",
    "⇒": "->",
    "¬": "~",
}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<hilbert>[ετι]_\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>->|/\\|\\/|[\\.:(){},=~;\[\]λΛΠ→∀∃ετι∧&∨⇒¬])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "sym" or "eof"
    value: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", column=pos + 1)
        kind = m.lastgroup
        value = m.group()
        if kind == "hilbert":
            out.append(Token("id", _UNICODE[value[0]] + value[1:], pos))
        elif kind == "id":
            out.append(Token("id", value, pos))
        elif kind == "sym":
            value = _UNICODE.get(value, value)
            kind = "id" if value[0].isalpha() else "sym"
            out.append(Token(kind, value, pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


class TokenStream:
    """Cursor over a token list with the usual peek/expect helpers."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def peek_at(self, k: int) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, value: str) -> bool:
        return self.peek.value == value and self.peek.kind != "eof"

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.i += 1
            return True
        return False

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.fail(f"expected {value!r}")
        return self.next()

    def ident(self) -> str:
        tok = self.peek
        if tok.kind != "id":
            self.fail("expected identifier")
        self.i += 1
        return tok.value

    def expect_eof(self) -> None:
        if self.peek.kind != "eof":
            self.fail("trailing input")

    def fail(self, message: str):
        tok = self.peek
        found = "end of input" if tok.kind == "eof" else repr(tok.value)
        raise ParseError(f"{message}, found {found}", column=tok.pos + 1)

"""Tokenizer and token-cursor helpers shared by the model-language parsers.

The statechart, tag-model, and tag-schema languages share one lexical
vocabulary: identifiers, double-quoted strings, punctuation, ``//`` and
``/* */`` comments.  They differ in how square brackets behave:

* statechart and tag-model files use ``[...]`` as opaque text (invariant
  expressions, bracketed element identifiers), captured verbatim as a
  single token with nesting allowed;
* tag-schema files use ``[`` and ``]`` as ordinary punctuation around
  enumeration domains.

``tokenize`` takes a ``raw_brackets`` flag to select between the two.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError


# ---------------------------------------------------------------------------
# Tokens
# ---------------------------------------------------------------------------

# Token kinds.  Punctuation tokens use their own spelling as the kind so
# parsers can write expect("{") and friends.
IDENT = "ident"
STRING = "string"
BRACKET = "bracket"  # raw [...] capture, value is the inner text
ELLIPSIS = "..."
ARROW = "->"
EOF = "eof"

_PUNCT = "{};,=:.|+*?()[]"


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    col: int
    start: int = 0  # character offset of the first character
    end: int = 0  # character offset one past the last character


def _string_repr(tok: Token) -> str:
    if tok.kind == EOF:
        return "end of input"
    if tok.kind == STRING:
        return "string literal"
    if tok.kind == BRACKET:
        return f"'[{tok.value}]'"
    return f"'{tok.value}'"


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------


def tokenize(text: str, *, raw_brackets: bool, filename: str | None = None) -> list[Token]:
    """Split ``text`` into tokens, ending with a single EOF token."""

    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def error(message: str, at_line: int, at_col: int) -> ParseError:
        return ParseError(message, at_line, at_col, filename)

    while i < n:
        ch = text[i]

        # -- whitespace ----------------------------------------------------
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue

        # -- comments ------------------------------------------------------
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("/*", i):
            start_line, start_col = line, col
            i += 2
            col += 2
            while i < n and not text.startswith("*/", i):
                if text[i] == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                i += 1
            if i >= n:
                raise error("unterminated block comment", start_line, start_col)
            i += 2
            col += 2
            continue

        # -- identifiers ---------------------------------------------------
        if ch.isalpha() or ch == "_":
            start = i
            start_col = col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
                col += 1
            tokens.append(Token(IDENT, text[start:i], line, start_col, start, i))
            continue

        # -- string literals -----------------------------------------------
        if ch == '"':
            start_line, start_col = line, col
            lit_start = i
            i += 1
            col += 1
            out: list[str] = []
            while True:
                if i >= n or text[i] == "\n":
                    raise error("unterminated string literal", start_line, start_col)
                c = text[i]
                if c == '"':
                    i += 1
                    col += 1
                    break
                if c == "\\":
                    if i + 1 >= n or text[i + 1] not in ('"', "\\"):
                        raise error(
                            "unsupported escape sequence (only \\\" and \\\\ are allowed)",
                            line,
                            col,
                        )
                    out.append(text[i + 1])
                    i += 2
                    col += 2
                    continue
                out.append(c)
                i += 1
                col += 1
            tokens.append(Token(STRING, "".join(out), start_line, start_col, lit_start, i))
            continue

        # -- raw bracket capture ---------------------------------------------
        if ch == "[" and raw_brackets:
            start_line, start_col = line, col
            depth = 1
            i += 1
            col += 1
            start = i
            while i < n and depth > 0:
                c = text[i]
                if c == "[":
                    depth += 1
                elif c == "]":
                    depth -= 1
                if c == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                i += 1
            if depth > 0:
                raise error("unterminated '[' expression", start_line, start_col)
            tokens.append(Token(BRACKET, text[start : i - 1], start_line, start_col, start - 1, i))
            continue

        # -- multi-character punctuation -------------------------------------
        if text.startswith("...", i):
            tokens.append(Token(ELLIPSIS, "...", line, col, i, i + 3))
            i += 3
            col += 3
            continue
        if text.startswith("->", i):
            tokens.append(Token(ARROW, "->", line, col, i, i + 2))
            i += 2
            col += 2
            continue

        # -- single-character punctuation ------------------------------------
        if ch in _PUNCT:
            tokens.append(Token(ch, ch, line, col, i, i + 1))
            i += 1
            col += 1
            continue

        raise error(f"unexpected character {ch!r}", line, col)

    tokens.append(Token(EOF, "", line, col, n, n))
    return tokens


# ---------------------------------------------------------------------------
# Cursor
# ---------------------------------------------------------------------------


class TokenCursor:
    """A position in a token stream with the usual peek/expect helpers."""

    def __init__(self, tokens: list[Token], filename: str | None = None):
        self._tokens = tokens
        self._pos = 0
        self.filename = filename

    # -- primitives ---------------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self._tokens[min(self._pos + offset, len(self._tokens) - 1)]

    def advance(self) -> Token:
        tok = self._tokens[self._pos]
        if tok.kind != EOF:
            self._pos += 1
        return tok

    def at(self, kind: str, value: str | None = None) -> bool:
        tok = self.peek()
        if tok.kind != kind:
            return False
        return value is None or tok.value == value

    def at_keyword(self, word: str) -> bool:
        return self.at(IDENT, word)

    def match(self, kind: str, value: str | None = None) -> Token | None:
        if self.at(kind, value):
            return self.advance()
        return None

    def expect(self, kind: str, value: str | None = None) -> Token:
        tok = self.peek()
        if not self.at(kind, value):
            want = f"'{value}'" if value is not None else _describe_kind(kind)
            raise self.error(f"expected {want}, found {_string_repr(tok)}", tok)
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        return self.expect(IDENT, word)

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok if tok is not None else self.peek()
        return ParseError(message, tok.line, tok.col, self.filename)

    # -- compound forms -------------------------------------------------------

    def qualified_name(self) -> tuple[tuple[str, ...], Token]:
        """Parse ``ident (. ident)*`` and return (segments, first token)."""

        first = self.expect(IDENT)
        parts = [first.value]
        while self.at("."):
            self.advance()
            parts.append(self.expect(IDENT).value)
        return tuple(parts), first


def _describe_kind(kind: str) -> str:
    if kind == IDENT:
        return "an identifier"
    if kind == STRING:
        return "a string literal"
    if kind == BRACKET:
        return "a '[...]' expression"
    return f"'{kind}'"

"""Flat lexical tokenization of snapshot text, with character spans.

One grammar ships built in under the name ``c-family``: C-style lexical
rules (identifiers ``[A-Za-z_][A-Za-z0-9_]*``, integer/float/hex literals,
``//`` and ``/* */`` comments, single/double-quoted strings with backslash
escapes, maximal-munch multi-character operators). The keyword set is the
fixed Java reserved-word list. Additional grammars plug in through
:func:`register_grammar`; a grammar is any callable from text to an ordered
list of :class:`RawToken` honoring the same span rules.

A string or block comment still open at end of file is not an error: the
token simply extends to the end of the buffer and carries
``unterminated=True``. Mid-edit snapshots are routinely ill-formed.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .errors import UnknownGrammar
from .textpos import CharRange, line_starts


class TokenKind(Enum):
    IDENTIFIER = "identifier"
    KEYWORD = "keyword"
    NUMBER = "number"
    STRING = "string"
    COMMENT = "comment"
    PUNCT = "punct"


@dataclass(frozen=True, slots=True)
class RawToken:
    """A lexical token: its kind, exact text, span, and start position.

    Spans are half-open [start, end) character offsets into the snapshot;
    ``line``/``col`` locate the span start. Whitespace is never a token.
    """

    kind: TokenKind
    text: str
    span: CharRange
    line: int
    col: int
    unterminated: bool = False


# The 50 Java reserved words (including const and goto, which are reserved
# but unused). Fixed keyword set for the built-in c-family grammar.
KEYWORDS = frozenset(
    """
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package
    private protected public return short static strictfp super switch
    synchronized this throw throws transient try void volatile while
    """.split()
)

# Multi-character operators, longest first so alternation is maximal-munch.
_PUNCTUATION = (
    ">>>=", "<<=", ">>=", ">>>", "...",
    "->", "::", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&", "||", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
)

_TOKEN_RE = re.compile(
    r"(?P<comment>//[^\n]*|/\*(?:[^*]|\*(?!/))*\*/)"
    r"|(?P<comment_open>/\*(?s:.*))"
    r"|(?P<string>\"(?:\\(?s:.)|[^\"\\])*\"|'(?:\\(?s:.)|[^'\\])*')"
    r"|(?P<string_open>\"(?:\\(?s:.)|[^\"\\])*\\?|'(?:\\(?s:.)|[^'\\])*\\?)"
    r"|(?P<number>0[xX][0-9a-fA-F]+[uUlL]*|(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?[uUlLfF]*)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    + "|(?P<punct>" + "|".join(re.escape(p) for p in _PUNCTUATION) + r"|[^\sA-Za-z0-9_])"
)

_GROUP_KINDS = {
    "comment": TokenKind.COMMENT,
    "comment_open": TokenKind.COMMENT,
    "string": TokenKind.STRING,
    "string_open": TokenKind.STRING,
    "number": TokenKind.NUMBER,
    "ident": TokenKind.IDENTIFIER,
    "punct": TokenKind.PUNCT,
}


def tokenize_c_family(text: str) -> list[RawToken]:
    """Tokenize with the built-in C-family lexical grammar."""
    starts = line_starts(text)
    tokens: list[RawToken] = []
    for m in _TOKEN_RE.finditer(text):
        group = m.lastgroup
        kind = _GROUP_KINDS[group]
        value = m.group()
        if kind is TokenKind.IDENTIFIER and value in KEYWORDS:
            kind = TokenKind.KEYWORD
        row = bisect_right(starts, m.start()) - 1
        tokens.append(
            RawToken(
                kind=kind,
                text=value,
                span=CharRange(m.start(), m.end()),
                line=row,
                col=m.start() - starts[row],
                unterminated=group in ("comment_open", "string_open"),
            )
        )
    return tokens


Grammar = Callable[[str], list[RawToken]]

_GRAMMARS: dict[str, Grammar] = {"c-family": tokenize_c_family}


def register_grammar(name: str, fn: Grammar) -> None:
    """Register (or replace) a tokenizer under `name`."""
    _GRAMMARS[name] = fn


def grammar_names() -> list[str]:
    return sorted(_GRAMMARS)


def tokenize(text: str, grammar: str = "c-family") -> list[RawToken]:
    """Tokenize `text` with the named grammar.

    The returned tokens have strictly increasing, non-overlapping spans that
    cover every non-whitespace character of `text`.
    """
    try:
        fn = _GRAMMARS[grammar]
    except KeyError:
        raise UnknownGrammar(
            f"no grammar named {grammar!r}; registered: {', '.join(grammar_names())}"
        ) from None
    return fn(text)

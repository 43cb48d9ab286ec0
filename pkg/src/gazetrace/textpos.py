"""Character-offset and line/column arithmetic over immutable text buffers.

Offsets count Unicode scalar values. Lines and columns are 0-based
throughout the library; only human-readable CLI messages are 1-based.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class CharRange:
    """Half-open character range [start, end). Empty ranges are allowed."""

    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid character range [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def contains_offset(self, offset: int) -> bool:
        return self.start <= offset < self.end

    def shifted(self, delta: int) -> "CharRange":
        return CharRange(self.start + delta, self.end + delta)

    def entirely_before(self, other: "CharRange") -> bool:
        """True when every position of self lies at or before other's start."""
        return self.end <= other.start

    def entirely_after(self, other: "CharRange") -> bool:
        """True when every position of self lies at or after other's end."""
        return self.start >= other.end


def line_starts(text: str) -> list[int]:
    """Offsets at which each line begins. Never empty; [0] for empty text."""
    starts = [0]
    idx = text.find("\n")
    while idx != -1:
        starts.append(idx + 1)
        idx = text.find("\n", idx + 1)
    return starts


def line_count(text: str) -> int:
    return text.count("\n") + 1


def offset_to_linecol(text: str, offset: int) -> tuple[int, int]:
    """0-based (line, col) of `offset`; offset == len(text) is the buffer end."""
    if not 0 <= offset <= len(text):
        raise ValueError(f"offset {offset} outside buffer of length {len(text)}")
    row = text.count("\n", 0, offset)
    col = offset - (text.rfind("\n", 0, offset) + 1)
    return row, col


def linecol_to_offset(text: str, line: int, col: int, starts: list[int] | None = None) -> int:
    """Offset of 0-based (line, col); col may point at most one past line end."""
    if starts is None:
        starts = line_starts(text)
    if not 0 <= line < len(starts):
        raise ValueError(f"line {line} outside buffer of {len(starts)} lines")
    if col < 0:
        raise ValueError(f"negative column {col}")
    end = starts[line + 1] - 1 if line + 1 < len(starts) else len(text)
    offset = starts[line] + col
    if offset > end:
        raise ValueError(f"column {col} past end of line {line}")
    return offset


def line_end_offset(text: str, line: int, starts: list[int] | None = None) -> int:
    """Offset just past the last content character of `line` (its newline, or EOF)."""
    if starts is None:
        starts = line_starts(text)
    if not 0 <= line < len(starts):
        raise ValueError(f"line {line} outside buffer of {len(starts)} lines")
    return starts[line + 1] - 1 if line + 1 < len(starts) else len(text)


def line_of_offset(starts: list[int], offset: int) -> int:
    """Index of the line containing `offset`, given precomputed line starts."""
    return bisect_right(starts, offset) - 1


def utf16_length(text: str) -> int:
    """Length of `text` in UTF-16 code units."""
    return len(text) + sum(1 for c in text if ord(c) > 0xFFFF)


def utf16_to_scalar_offset(text: str, units: int) -> int:
    """Convert an offset counted in UTF-16 code units to a scalar-value offset.

    Raises ValueError when `units` lands inside a surrogate pair or past the
    end of the buffer.
    """
    if units < 0:
        raise ValueError(f"negative UTF-16 offset {units}")
    seen = 0
    for i, c in enumerate(text):
        if seen == units:
            return i
        seen += 2 if ord(c) > 0xFFFF else 1
        if seen > units:
            raise ValueError(f"UTF-16 offset {units} splits a surrogate pair")
    if seen == units:
        return len(text)
    raise ValueError(f"UTF-16 offset {units} past end of buffer ({seen} units)")

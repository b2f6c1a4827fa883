"""Partial-observation patterns over a window of past time slots.

A pattern constrains the pair chain on the slots ``-k .. -1`` (oldest first).
Each slot either fixes the first coordinate, the second coordinate, both, or
nothing.  Patterns encode every conditioning event used by the quantity and
bound computations: pure pair pasts, one-coordinate pasts, and mixed pasts.

The textual syntax (used by the CLI and in witnesses) is one token per slot,
separated by commas, oldest slot first:

    ``*``        free slot
    ``x=A``      first coordinate equals symbol ``A``
    ``y=B``      second coordinate equals symbol ``B``
    ``xy=A,B``   both coordinates fixed

Example: ``"y=1,*,xy=0,0,x=1"`` is a depth-4 pattern.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParameterError

__all__ = [
    "Slot",
    "ObservationPattern",
    "parse_pattern",
    "format_pattern",
    "pair_past",
    "x_past",
    "y_past",
    "free_past",
]


@dataclass(frozen=True)
class Slot:
    """Constraint on one time slot: either coordinate may be pinned or free."""

    x: int | None = None
    y: int | None = None

    @staticmethod
    def free() -> "Slot":
        return Slot(None, None)

    @staticmethod
    def x_eq(symbol: int) -> "Slot":
        return Slot(int(symbol), None)

    @staticmethod
    def y_eq(symbol: int) -> "Slot":
        return Slot(None, int(symbol))

    @staticmethod
    def pair(x: int, y: int) -> "Slot":
        return Slot(int(x), int(y))

    @property
    def is_free(self) -> bool:
        return self.x is None and self.y is None

    def matches(self, x: int, y: int) -> bool:
        return (self.x is None or self.x == x) and (self.y is None or self.y == y)

    def check_alphabet(self, size: int) -> None:
        for value in (self.x, self.y):
            if value is not None and not 0 <= value < size:
                raise ParameterError(
                    f"slot symbol {value} outside alphabet of size {size}"
                )


@dataclass(frozen=True)
class ObservationPattern:
    """A sequence of slot constraints for positions ``-k .. -1``, oldest first."""

    slots: tuple[Slot, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "slots", tuple(self.slots))

    @property
    def depth(self) -> int:
        return len(self.slots)

    def check_alphabet(self, size: int) -> None:
        for slot in self.slots:
            slot.check_alphabet(size)

    def extended_left(self, extra: Sequence[Slot]) -> "ObservationPattern":
        """Return the pattern with ``extra`` slots prepended (older positions)."""
        return ObservationPattern(tuple(extra) + self.slots)

    def __str__(self) -> str:
        return format_pattern(self)


def _format_slot(slot: Slot) -> str:
    if slot.is_free:
        return "*"
    if slot.y is None:
        return f"x={slot.x}"
    if slot.x is None:
        return f"y={slot.y}"
    return f"xy={slot.x},{slot.y}"


def format_pattern(pattern: ObservationPattern) -> str:
    """Render a pattern in the textual slot syntax (empty string for depth 0)."""
    return ",".join(_format_slot(slot) for slot in pattern.slots)


def _parse_symbol(token: str, context: str) -> int:
    token = token.strip()
    if not token.isdigit():
        raise ParameterError(f"bad symbol {token!r} in pattern slot {context!r}")
    return int(token)


def parse_pattern(text: str) -> ObservationPattern:
    """Parse the textual slot syntax.

    A ``xy=A`` token consumes the following comma-separated token as the
    second symbol, so ``xy=0,1`` is one slot even though it contains a comma.
    """
    text = text.strip()
    if not text:
        return ObservationPattern(())
    tokens = [t.strip() for t in text.split(",")]
    slots: list[Slot] = []
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if token == "*":
            slots.append(Slot.free())
        elif token.startswith("x="):
            slots.append(Slot.x_eq(_parse_symbol(token[2:], token)))
        elif token.startswith("y="):
            slots.append(Slot.y_eq(_parse_symbol(token[2:], token)))
        elif token.startswith("xy="):
            if i + 1 >= len(tokens):
                raise ParameterError(f"pattern slot {token!r} is missing its second symbol")
            first = _parse_symbol(token[3:], token)
            second = _parse_symbol(tokens[i + 1], token)
            slots.append(Slot.pair(first, second))
            i += 1
        else:
            raise ParameterError(f"unrecognized pattern slot {token!r}")
        i += 1
    return ObservationPattern(tuple(slots))


def pair_past(pairs: Iterable[tuple[int, int]]) -> ObservationPattern:
    """Pattern pinning full pair symbols, oldest first."""
    return ObservationPattern(tuple(Slot.pair(x, y) for x, y in pairs))


def x_past(symbols: Iterable[int]) -> ObservationPattern:
    """Pattern pinning only the first coordinate on every slot."""
    return ObservationPattern(tuple(Slot.x_eq(s) for s in symbols))


def y_past(symbols: Iterable[int]) -> ObservationPattern:
    """Pattern pinning only the second coordinate on every slot."""
    return ObservationPattern(tuple(Slot.y_eq(s) for s in symbols))


def free_past(depth: int) -> ObservationPattern:
    """Fully unconstrained pattern of the given depth."""
    return ObservationPattern(tuple(Slot.free() for _ in range(depth)))

"""Canonical elements of the free Boolean algebra on countably many generators.

A combination is stored as a truth table over a finite sorted support of
generator indices, minimised so the table depends on every listed index.
Two combinations are equal iff they are equal after extending to a common
support, which the canonical form turns into plain structural equality.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class GeneratorCombination:
    """Finitely supported element of the free Boolean algebra.

    ``support`` lists the generator indices the value depends on, sorted.
    ``rows`` holds the satisfying assignments as bitmasks: bit ``k`` of a
    row is the value of ``support[k]``.  Top is the empty support with the
    single empty row; bottom is the empty support with no rows.
    """

    support: tuple[int, ...]
    rows: frozenset[int]

    def __post_init__(self):
        if tuple(sorted(set(self.support))) != self.support:
            raise ValueError("support must be sorted and duplicate-free")
        width = 1 << len(self.support)
        if any(r < 0 or r >= width for r in self.rows):
            raise ValueError("row bitmask out of range for support")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def top() -> "GeneratorCombination":
        return GeneratorCombination((), frozenset((0,)))

    @staticmethod
    def bottom() -> "GeneratorCombination":
        return GeneratorCombination((), frozenset())

    @staticmethod
    def generator(n: int) -> "GeneratorCombination":
        if n < 0:
            raise ValueError("generator index must be a natural number")
        return GeneratorCombination((n,), frozenset((1,)))

    @staticmethod
    def minterm(signs: dict[int, bool]) -> "GeneratorCombination":
        """Single sign pattern, e.g. ``{0: True, 1: False}`` for A0 & ~A1."""
        support = tuple(sorted(signs))
        row = sum(1 << k for k, idx in enumerate(support) if signs[idx])
        return canonical(support, frozenset((row,)))

    @staticmethod
    def from_rows(support: tuple[int, ...], rows: frozenset[int]) -> "GeneratorCombination":
        return canonical(support, rows)

    # -- queries -----------------------------------------------------------

    @property
    def is_top(self) -> bool:
        return not self.support and bool(self.rows)

    @property
    def is_bottom(self) -> bool:
        return not self.rows

    def evaluate(self, assignment) -> bool:
        """Truth value under ``assignment``, a map or predicate on indices."""
        get = assignment.__getitem__ if hasattr(assignment, "__getitem__") else assignment
        row = sum(1 << k for k, idx in enumerate(self.support) if get(idx))
        return row in self.rows

    # -- algebra -----------------------------------------------------------

    def __invert__(self) -> "GeneratorCombination":
        width = 1 << len(self.support)
        return canonical(self.support, frozenset(range(width)) - self.rows)

    def __and__(self, other: "GeneratorCombination") -> "GeneratorCombination":
        support, rows_a, rows_b = _align(self, other)
        return canonical(support, rows_a & rows_b)

    def __or__(self, other: "GeneratorCombination") -> "GeneratorCombination":
        support, rows_a, rows_b = _align(self, other)
        return canonical(support, rows_a | rows_b)

    def implies(self, other: "GeneratorCombination") -> "GeneratorCombination":
        return ~self | other

    def iff(self, other: "GeneratorCombination") -> "GeneratorCombination":
        return self.implies(other) & other.implies(self)

    def entails(self, other: "GeneratorCombination") -> bool:
        return self.implies(other).is_top

    # -- rendering ---------------------------------------------------------

    def minterm_lines(self) -> list[str]:
        """Sorted minterm list over the support, one per line, ``+A0 -A1``."""
        if self.is_top:
            return ["TOP"]
        if self.is_bottom:
            return ["BOTTOM"]
        lines = []
        for row in sorted(self.rows):
            signs = []
            for k, idx in enumerate(self.support):
                signs.append(f"{'+' if row >> k & 1 else '-'}A{idx}")
            lines.append(" ".join(signs))
        return lines

    def __str__(self) -> str:
        return "; ".join(self.minterm_lines())


def _align(a: GeneratorCombination, b: GeneratorCombination):
    support = tuple(sorted(set(a.support) | set(b.support)))
    return support, _extend(a, support), _extend(b, support)


def _extend(g: GeneratorCombination, support: tuple[int, ...]) -> frozenset[int]:
    positions = [support.index(idx) for idx in g.support]
    extra = [k for k in range(len(support)) if support[k] not in g.support]
    rows = set()
    for row in g.rows:
        base = 0
        for k, pos in enumerate(positions):
            if row >> k & 1:
                base |= 1 << pos
        stack = [base]
        for pos in extra:
            stack = [r | (bit << pos) for r in stack for bit in (0, 1)]
        rows.update(stack)
    return frozenset(rows)


def canonical(support: tuple[int, ...], rows: frozenset[int]) -> GeneratorCombination:
    """Drop support indices the truth table does not depend on."""
    support = tuple(support)
    changed = True
    while changed:
        changed = False
        for k in range(len(support)):
            lo = frozenset(_drop_bit(r, k) for r in rows if not r >> k & 1)
            hi = frozenset(_drop_bit(r, k) for r in rows if r >> k & 1)
            if lo == hi:
                support = support[:k] + support[k + 1:]
                rows = lo
                changed = True
                break
    return GeneratorCombination(support, rows)


def _drop_bit(row: int, k: int) -> int:
    low = row & ((1 << k) - 1)
    high = row >> (k + 1)
    return low | (high << k)


TOP = GeneratorCombination.top()
BOTTOM = GeneratorCombination.bottom()

"""Young diagrams: cells, contents, profiles, dimensions and Frobenius data.

Diagrams are stored as tuples of row lengths.  Coordinates of a profile use
the Russian convention, so a cell in row ``i`` and column ``j`` (1-indexed)
has content ``j - i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterator, Sequence


@dataclass(frozen=True, order=True)
class YoungDiagram:
    """A partition given by weakly decreasing positive row lengths."""

    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p < 1 for p in parts):
            raise ValueError(f"row lengths must be positive, got {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"row lengths must be weakly decreasing, got {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def from_multiplicities(cls, mult: dict[int, int]) -> "YoungDiagram":
        """Build ``(1^{m_1} 2^{m_2} ...)`` from a ``{length: count}`` mapping."""
        parts: list[int] = []
        for length in sorted(mult, reverse=True):
            parts.extend([length] * mult[length])
        return cls(tuple(parts))

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def multiplicity(self, j: int) -> int:
        """Number of rows of length ``j``."""
        return self.parts.count(j)

    def multiplicities(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for p in self.parts:
            out[p] = out.get(p, 0) + 1
        return out

    def conjugate(self) -> "YoungDiagram":
        if not self.parts:
            return self
        return YoungDiagram(
            tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0]))
        )

    def cells(self) -> Iterator[tuple[int, int]]:
        for i, p in enumerate(self.parts, start=1):
            for j in range(1, p + 1):
                yield i, j

    def contents(self) -> list[int]:
        return [j - i for i, j in self.cells()]

    def add_cell(self, row: int) -> "YoungDiagram":
        """Diagram with one box appended to ``row`` (1-indexed; ``len+1`` opens a row)."""
        parts = list(self.parts)
        if row == len(parts) + 1:
            parts.append(1)
        else:
            parts[row - 1] += 1
        return YoungDiagram(tuple(parts))

    def remove_cell(self, row: int) -> "YoungDiagram":
        parts = list(self.parts)
        parts[row - 1] -= 1
        if parts[row - 1] == 0:
            parts.pop(row - 1)
        return YoungDiagram(tuple(parts))

    def __str__(self) -> str:
        if not self.parts:
            return "()"
        return "(" + ",".join(map(str, self.parts)) + ")"


EMPTY = YoungDiagram(())


def as_diagram(obj: YoungDiagram | Sequence[int]) -> YoungDiagram:
    if isinstance(obj, YoungDiagram):
        return obj
    return YoungDiagram(tuple(obj))


def partitions(n: int, max_part: int | None = None) -> Iterator[YoungDiagram]:
    """All diagrams of size ``n`` in reverse lexicographic order."""
    if n < 0:
        return
    if max_part is None:
        max_part = n

    def _gen(rest: int, cap: int) -> Iterator[tuple[int, ...]]:
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, cap), 0, -1):
            for tail in _gen(rest - first, first):
                yield (first,) + tail

    for parts in _gen(n, max_part):
        yield YoungDiagram(parts)


def addable_cells(lam: YoungDiagram) -> list[tuple[int, int, int]]:
    """Cells ``(row, col, content)`` whose addition gives a diagram, by increasing content."""
    lam = as_diagram(lam)
    parts = lam.parts
    out = [(len(parts) + 1, 1, -len(parts))]
    for i in range(len(parts), 0, -1):
        if i == 1 or parts[i - 2] > parts[i - 1]:
            out.append((i, parts[i - 1] + 1, parts[i - 1] + 1 - i))
    return out


def removable_cells(lam: YoungDiagram) -> list[tuple[int, int, int]]:
    """Corner cells ``(row, col, content)`` by increasing content."""
    lam = as_diagram(lam)
    parts = lam.parts
    out = []
    for i in range(len(parts), 0, -1):
        if i == len(parts) or parts[i - 1] > parts[i]:
            out.append((i, parts[i - 1], parts[i - 1] - i))
    return out


def hook_lengths(lam: YoungDiagram) -> list[int]:
    lam = as_diagram(lam)
    conj = lam.conjugate().parts
    return [
        (lam.parts[i - 1] - j) + (conj[j - 1] - i) + 1 for i, j in lam.cells()
    ]


def dim_sym(lam: YoungDiagram) -> int:
    """Number of standard tableaux of shape ``lam`` (hook-length formula)."""
    lam = as_diagram(lam)
    return math.factorial(lam.size) // math.prod(hook_lengths(lam))


@dataclass(frozen=True)
class FrobeniusCoordinates:
    arms: tuple[int, ...]
    legs: tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.arms)


def frobenius(lam: YoungDiagram) -> FrobeniusCoordinates:
    """Arms ``b_i = lam_i - i`` and legs ``a_i = lam'_i - i`` over the diagonal."""
    lam = as_diagram(lam)
    conj = lam.conjugate().parts
    d = sum(1 for i, p in enumerate(lam.parts, start=1) if p >= i)
    return FrobeniusCoordinates(
        arms=tuple(lam.parts[i - 1] - i for i in range(1, d + 1)),
        legs=tuple(conj[i - 1] - i for i in range(1, d + 1)),
    )


def sigma2(lam: YoungDiagram) -> int:
    """Frobenius' value of the normalised transposition character.

    Computed from Frobenius coordinates and checked against twice the content
    sum, which must agree for every diagram.
    """
    fc = frobenius(lam)
    value = sum(b * (b + 1) - a * (a + 1) for b, a in zip(fc.arms, fc.legs))
    if value != 2 * sum(as_diagram(lam).contents()):
        raise ArithmeticError(f"Frobenius and content forms disagree for {lam}")
    return value


@dataclass(frozen=True)
class RectangularProfile:
    """Valleys ``x_1 < y_1 < x_2 < ... < y_{r-1} < x_r`` of a piecewise-linear diagram."""

    valleys: tuple
    peaks: tuple

    def __post_init__(self):
        valleys, peaks = tuple(self.valleys), tuple(self.peaks)
        if len(valleys) != len(peaks) + 1:
            raise ValueError("need exactly one more valley than peaks")
        merged = [valleys[0]]
        for y, x in zip(peaks, valleys[1:]):
            merged.extend([y, x])
        if any(merged[i] >= merged[i + 1] for i in range(len(merged) - 1)):
            raise ValueError("valleys and peaks must strictly interlace")
        object.__setattr__(self, "valleys", valleys)
        object.__setattr__(self, "peaks", peaks)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Rational) for c in self.valleys + self.peaks)

    def center(self):
        return sum(self.valleys) - sum(self.peaks)

    def __call__(self, x: float) -> float:
        """Height of the profile at ``x``."""
        v, p = self.valleys, self.peaks
        u = float(self.center())
        if x <= v[0] or x >= v[-1]:
            return abs(x - u)
        y, last, slope = abs(float(v[0]) - u), float(v[0]), 1.0
        for i in range(len(p)):
            for pos, next_slope in ((float(p[i]), -1.0), (float(v[i + 1]), 1.0)):
                if x <= pos:
                    return y + slope * (x - last)
                y += slope * (pos - last)
                last, slope = pos, next_slope
        return y + slope * (x - last)


def profile(lam: YoungDiagram) -> RectangularProfile:
    """Valleys are contents of addable cells, peaks contents of removable cells."""
    return RectangularProfile(
        valleys=tuple(c for _, _, c in addable_cells(lam)),
        peaks=tuple(c for _, _, c in removable_cells(lam)),
    )


def rescale_profile(p: RectangularProfile, factor: Real) -> RectangularProfile:
    """Multiply every coordinate by ``factor`` (exact when ``factor`` is rational)."""
    if factor <= 0:
        raise ValueError("factor must be positive")
    if isinstance(factor, Rational) and p.is_exact:
        factor = Fraction(factor)
        return RectangularProfile(
            tuple(factor * x for x in p.valleys), tuple(factor * y for y in p.peaks)
        )
    factor = float(factor)
    return RectangularProfile(
        tuple(factor * float(x) for x in p.valleys),
        tuple(factor * float(y) for y in p.peaks),
    )


def rectangle(rows: int, cols: int) -> YoungDiagram:
    return YoungDiagram((cols,) * rows)

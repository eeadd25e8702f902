"""Leading-order expansion of ``E[J^k (y, (n+1))]`` in ``S_n(Z_r)``.

For every shape ``sigma`` of size ``k`` without 1-rows, the removal of its
first column gives ``sigma_x``; each row of ``sigma_x`` is labelled by a colour
subject to a total-colour constraint, and each labelling contributes a
coefficient ``|NC(sigma)| r^{k-l} prod(multinomials) n^{k-l}`` on the normalised
class indicator of the labelled type.  The difference from the exact
brute-force coefficient is measured, not modelled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

from .diagrams import YoungDiagram, partitions
from .freeprob import nc_count
from .wreath_group import (
    DEFAULT_TERM_BUDGET,
    ConjType,
    class_coefficients,
    class_size,
    jm_moment_bruteforce,
)


@dataclass(frozen=True)
class ReducedShape:
    """A diagram with no rows of length 1, with its first column removed."""

    sigma: YoungDiagram

    def __post_init__(self):
        sigma = self.sigma if isinstance(self.sigma, YoungDiagram) else YoungDiagram(tuple(self.sigma))
        if sigma.multiplicity(1):
            raise ValueError(f"{sigma} has rows of length 1")
        object.__setattr__(self, "sigma", sigma)

    @property
    def k(self) -> int:
        return self.sigma.size

    @property
    def length(self) -> int:
        return self.sigma.length

    @property
    def cross(self) -> YoungDiagram:
        """First column removed: ``m_j(sigma_x) = m_{j+1}(sigma)``."""
        return YoungDiagram(tuple(p - 1 for p in self.sigma.parts))

    @property
    def circ(self) -> YoungDiagram:
        """``cross`` with its rows of length 1 dropped."""
        return YoungDiagram(tuple(p - 1 for p in self.sigma.parts if p > 2))

    def walk_steps(self) -> tuple[int, int]:
        """``(up, down)`` step counts of a walk ending at ``circ``."""
        c = self.circ
        twice_down = self.k - (c.size - c.length)
        if twice_down % 2:
            raise ArithmeticError(f"odd step count for {self.sigma}")
        down = twice_down // 2
        return self.k - down, down

    def __str__(self) -> str:
        return str(self.sigma)


def reduced_shapes(k: int) -> Iterator[ReducedShape]:
    """Shapes of size ``k`` with every row of length at least 2."""
    for sigma in partitions(k):
        if not sigma.multiplicity(1):
            yield ReducedShape(sigma)


@dataclass(frozen=True)
class Labeling:
    """``counts[(i, x)]``: rows of length ``i`` in ``sigma_x`` carrying colour ``x != 0``."""

    shape: ReducedShape
    counts: tuple[tuple[tuple[int, int], int], ...]

    def count(self, i: int, x: int) -> int:
        return dict(self.counts).get((i, x), 0)

    def zero_count(self, i: int) -> int:
        """Rows of length ``i`` left with colour 0."""
        labelled = sum(c for (j, _), c in self.counts if j == i)
        return self.shape.cross.multiplicity(i) - labelled

    def total_color(self, r: int) -> int:
        return sum(x * c for (_, x), c in self.counts) % r

    def conj_type(self, r: int) -> ConjType:
        """Reduced type: colour-0 rows of length 1 are dropped."""
        rows: dict[int, list[int]] = {x: [] for x in range(r)}
        for i in self.shape.cross.multiplicities():
            for x in range(1, r):
                rows[x].extend([i] * self.count(i, x))
            if i > 1:
                rows[0].extend([i] * self.zero_count(i))
        return ConjType.from_mapping(r, rows)

    def multinomial(self, r: int) -> int:
        out = 1
        for i, m in self.shape.cross.multiplicities().items():
            ks = [self.count(i, x) for x in range(1, r)] + [self.zero_count(i)]
            coeff = math.factorial(m)
            for c in ks:
                coeff //= math.factorial(c)
            out *= coeff
        return out

    def __str__(self) -> str:
        if not self.counts:
            return "-"
        return ",".join(f"n[{i}][{x}]={c}" for (i, x), c in self.counts)


def star_labelings(shape: ReducedShape, y: int, r: int) -> list[Labeling]:
    """Colourings of the rows of ``sigma_x`` by ``Z_r \\ {0}`` with total colour ``y``.

    Row lengths and colours are iterated in increasing order, so the output
    order is canonical.
    """
    mult = sorted(shape.cross.multiplicities().items())
    colors = list(range(1, r))
    per_length = []
    for i, m in mult:
        options = [
            vec for vec in product(range(m + 1), repeat=len(colors)) if sum(vec) <= m
        ]
        per_length.append((i, options))
    out = []
    for choice in product(*(opts for _, opts in per_length)):
        counts = []
        for (i, _), vec in zip(per_length, choice):
            for x, c in zip(colors, vec):
                if c:
                    counts.append(((i, x), c))
        lab = Labeling(shape, tuple(counts))
        if lab.total_color(r) == y % r:
            out.append(lab)
    return out


@dataclass(frozen=True)
class MainTerm:
    """``prefactor * n^exponent`` times the normalised indicator ``A_C/|C|``."""

    shape: ReducedShape
    labeling: Labeling
    conj_type: ConjType
    prefactor: int
    exponent: int

    def normalized_coefficient(self, n: int) -> int:
        """Coefficient on ``A_C / |C|``."""
        return self.prefactor * n**self.exponent

    def element_coefficient(self, n: int) -> Fraction:
        """Coefficient on each group element of the class."""
        return Fraction(self.normalized_coefficient(n), class_size(self.conj_type, n))


def main_terms(k: int, y: int, r: int, n: int) -> list[MainTerm]:
    """Leading terms for every labelled shape whose class fits in degree ``n``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    terms = []
    for shape in reduced_shapes(k):
        if shape.cross.size > n:
            continue
        exponent = k - shape.length
        base = nc_count(shape.sigma) * r**exponent
        for lab in star_labelings(shape, y, r):
            terms.append(
                MainTerm(
                    shape=shape,
                    labeling=lab,
                    conj_type=lab.conj_type(r),
                    prefactor=base * lab.multinomial(r),
                    exponent=exponent,
                )
            )
    return terms


@dataclass(frozen=True)
class ComparisonRow:
    conj_type: ConjType
    shapes: tuple[str, ...]
    exact: Fraction
    main: Fraction
    class_size: int
    exponent: int

    @property
    def relative_error(self) -> float:
        if self.exact == 0:
            return 0.0 if self.main == 0 else math.inf
        return abs(float((self.main - self.exact) / self.exact))


@dataclass
class ComparisonReport:
    k: int
    y: int
    r: int
    n: int
    rows: list[ComparisonRow]
    residual: dict[ConjType, Fraction]

    def max_relative_error(self) -> float:
        return max((row.relative_error for row in self.rows), default=0.0)

    def scaled_residuals(self) -> dict[ConjType, float]:
        """``|exact - main|`` on the normalised scale divided by ``n^{exponent-1}``."""
        out = {}
        for row in self.rows:
            gap = abs(row.exact - row.main) * row.class_size
            out[row.conj_type] = float(gap) / self.n ** (row.exponent - 1)
        return out

    def to_csv_rows(self) -> list[list[str]]:
        header = ["class", "shapes", "exact", "main", "relative_error", "residual_only"]
        body = [
            [
                str(row.conj_type),
                ";".join(row.shapes),
                str(row.exact),
                str(row.main),
                f"{row.relative_error:.6g}",
                "0",
            ]
            for row in self.rows
        ]
        body += [[str(rho), "", str(c), "0", "inf", "1"] for rho, c in self.residual.items()]
        return [header] + body


def compare_bruteforce(
    k: int, y: int, r: int, n: int, budget: int = DEFAULT_TERM_BUDGET
) -> ComparisonReport:
    """Per-class exact versus main-term coefficients on group elements."""
    exact = class_coefficients(jm_moment_bruteforce(k, y, n, r, budget))
    main: dict[ConjType, Fraction] = {}
    shapes: dict[ConjType, list[str]] = {}
    exponents: dict[ConjType, int] = {}
    for term in main_terms(k, y, r, n):
        rho = term.conj_type
        main[rho] = main.get(rho, Fraction(0)) + term.element_coefficient(n)
        shapes.setdefault(rho, []).append(str(term.shape))
        exponents[rho] = max(exponents.get(rho, 0), term.exponent)
    rows = [
        ComparisonRow(
            conj_type=rho,
            shapes=tuple(shapes[rho]),
            exact=Fraction(exact.get(rho, 0)),
            main=main[rho],
            class_size=class_size(rho, n),
            exponent=exponents[rho],
        )
        for rho in main
    ]
    residual = {rho: Fraction(c) for rho, c in exact.items() if rho not in main}
    return ComparisonReport(k=k, y=y, r=r, n=n, rows=rows, residual=residual)


# -- walk semantics ------------------------------------------------------------


def walk_census(k: int, n: int) -> dict[YoungDiagram, int]:
    """Count letter sequences whose transposition walk uses only down and strict-up steps.

    The walk multiplies ``(i_1 *), (i_2 *), ...`` from the left on the
    symmetric group of ``{1..n, *}``.  A step is up when it merges two cycles,
    strict when its letter is new.  Sequences ending in a permutation that
    fixes ``*`` are grouped by the block sizes of the partition formed by
    repeated letters, with each singleton joined to its innermost enclosing pair.
    """
    star = n
    out: dict[YoungDiagram, int] = {}
    for seq in product(range(n), repeat=k):
        perm = list(range(n + 1))
        seen: set[int] = set()
        ok = True
        for i in seq:
            # left multiplication by (i *) swaps the images i and * in the cycle structure
            same_cycle = _same_cycle(perm, i, star)
            if i in seen and not same_cycle:
                ok = False  # a seen letter merging cycles is a semi-up step
                break
            seen.add(i)
            _left_transpose(perm, i, star)
        if not ok or perm[star] != star:
            continue
        blocks = _blocks_of(seq)
        if blocks is None:
            continue
        sigma = YoungDiagram(tuple(sorted(blocks, reverse=True)))
        out[sigma] = out.get(sigma, 0) + 1
    return out


def _same_cycle(perm: list[int], a: int, b: int) -> bool:
    j = perm[a]
    while j != a:
        if j == b:
            return True
        j = perm[j]
    return False


def _left_transpose(perm: list[int], a: int, b: int) -> None:
    """Replace ``perm`` by ``(a b) o perm``."""
    for j, v in enumerate(perm):
        if v == a:
            ja = j
        elif v == b:
            jb = j
    perm[ja], perm[jb] = b, a


def _blocks_of(seq: tuple[int, ...]) -> list[int] | None:
    positions: dict[int, list[int]] = {}
    for p, i in enumerate(seq):
        positions.setdefault(i, []).append(p)
    pairs = []
    for ps in positions.values():
        if len(ps) > 2:
            return None
        if len(ps) == 2:
            pairs.append((ps[0], ps[1]))
    sizes = {pair: 2 for pair in pairs}
    for ps in positions.values():
        if len(ps) == 1:
            p = ps[0]
            enclosing = [q for q in pairs if q[0] < p < q[1]]
            if not enclosing:
                return None
            inner = min(enclosing, key=lambda q: q[1] - q[0])
            sizes[inner] += 1
    return list(sizes.values())


__all__ = [
    "ComparisonReport",
    "ComparisonRow",
    "Labeling",
    "MainTerm",
    "ReducedShape",
    "compare_bruteforce",
    "main_terms",
    "reduced_shapes",
    "star_labelings",
    "walk_census",
]

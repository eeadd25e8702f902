"""Exact group algebra of the wreath product ``S_m(Z_r)`` of ``Z_r`` by ``S_m``.

An element is a pair ``(d, w)`` of a colour vector ``d`` in ``Z_r^m`` and a
permutation ``w`` of the slots ``0..m-1`` (stored by images, ``w[j] = w(j)``).
The group law is

    (d, w)(d', w') = (d + w.d', w w'),   (w.d')[w(j)] = d'[j],

i.e. permutations carry colours along with the slot they move.  With this
convention ``(d, w)`` acts on coloured slots by ``(j, c) -> (w(j), c + d[w(j)])``,
so the product is composition of maps and is associative.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from typing import Iterable, Iterator, Mapping, NamedTuple

from .diagrams import YoungDiagram

DEFAULT_TERM_BUDGET = 5_000_000


class BudgetExceeded(RuntimeError):
    """A computation would exceed its configured size budget."""


@dataclass(frozen=True)
class AbelianGroupSpec:
    """The cyclic colour group ``Z_r`` (written additively, identity 0)."""

    r: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be at least 1")

    @property
    def order(self) -> int:
        return self.r

    def elements(self) -> range:
        return range(self.r)

    def nonidentity(self) -> range:
        return range(1, self.r)


class WreathElement(NamedTuple):
    colors: tuple[int, ...]
    perm: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.perm)


def make_element(colors: Iterable[int], perm: Iterable[int], r: int) -> WreathElement:
    """Validated element from colours and a 0-based image tuple."""
    colors = tuple(int(c) % r for c in colors)
    perm = tuple(int(p) for p in perm)
    if len(colors) != len(perm):
        raise ValueError("colour vector and permutation must have the same degree")
    if sorted(perm) != list(range(len(perm))):
        raise ValueError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
    return WreathElement(colors, perm)


def transposition(m: int, i: int, j: int) -> tuple[int, ...]:
    """Image tuple of the transposition of slots ``i`` and ``j`` (1-based)."""
    perm = list(range(m))
    perm[i - 1], perm[j - 1] = j - 1, i - 1
    return tuple(perm)


def identity_element(m: int) -> WreathElement:
    return WreathElement((0,) * m, tuple(range(m)))


def group_multiply(g: WreathElement, h: WreathElement, r: int) -> WreathElement:
    d, w = g
    d2, w2 = h
    colors = list(d)
    for j, c in enumerate(d2):
        if c:
            colors[w[j]] = (colors[w[j]] + c) % r
    return WreathElement(tuple(colors), tuple(w[x] for x in w2))


def group_inverse(g: WreathElement, r: int) -> WreathElement:
    d, w = g
    inv = [0] * len(w)
    for j, x in enumerate(w):
        inv[x] = j
    # (d, w)^{-1} = (-w^{-1}.d, w^{-1})
    colors = [0] * len(w)
    for j, c in enumerate(d):
        colors[inv[j]] = (-c) % r
    return WreathElement(tuple(colors), tuple(inv))


def all_elements(m: int, r: int) -> Iterator[WreathElement]:
    for perm in permutations(range(m)):
        for colors in product(range(r), repeat=m):
            yield WreathElement(colors, perm)


def generators(m: int, r: int) -> list[WreathElement]:
    """Adjacent transpositions plus a unit colour on the first slot."""
    gens = [WreathElement((0,) * m, transposition(m, i, i + 1)) for i in range(1, m)]
    if m >= 1 and r > 1:
        gens.append(WreathElement((1,) + (0,) * (m - 1), tuple(range(m))))
    return gens


# -- conjugacy types ---------------------------------------------------------


@dataclass(frozen=True)
class ConjType:
    """Cycle type of a wreath element: one partition of cycle lengths per colour."""

    rows: tuple[YoungDiagram, ...]

    def __post_init__(self):
        rows = tuple(
            p if isinstance(p, YoungDiagram) else YoungDiagram(tuple(p)) for p in self.rows
        )
        if not rows:
            raise ValueError("a conjugacy type needs at least one colour")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_mapping(cls, r: int, rows: Mapping[int, Iterable[int]]) -> "ConjType":
        out = [YoungDiagram(())] * r
        for x, parts in rows.items():
            out[x % r] = YoungDiagram(tuple(sorted(parts, reverse=True)))
        return cls(tuple(out))

    @classmethod
    def identity(cls, r: int) -> "ConjType":
        return cls((YoungDiagram(()),) * r)

    @property
    def r(self) -> int:
        return len(self.rows)

    @property
    def size(self) -> int:
        return sum(p.size for p in self.rows)

    @property
    def length(self) -> int:
        return sum(p.length for p in self.rows)

    def reduced(self) -> "ConjType":
        """Drop fixed points of colour 0."""
        zero = YoungDiagram(tuple(p for p in self.rows[0].parts if p > 1))
        return ConjType((zero,) + self.rows[1:])

    def padded(self, n: int) -> "ConjType":
        """Add colour-0 fixed points up to total size ``n``."""
        red = self.reduced()
        extra = n - red.size
        if extra < 0:
            raise ValueError(f"type of size {red.size} does not fit in degree {n}")
        zero = YoungDiagram(red.rows[0].parts + (1,) * extra)
        return ConjType((zero,) + red.rows[1:])

    @property
    def support_size(self) -> int:
        """Size of the reduced type: number of slots an element actually moves or colours."""
        return self.reduced().size

    def __str__(self) -> str:
        items = [f"{p}_{x}" for x, p in enumerate(self.rows) if p.parts]
        return " ".join(items) if items else "e"


def conj_type_of(g: WreathElement, r: int) -> ConjType:
    """Reduced conjugacy type: cycle lengths grouped by the sum of colours on each cycle."""
    d, w = g
    seen = [False] * len(w)
    rows: list[list[int]] = [[] for _ in range(r)]
    for start in range(len(w)):
        if seen[start]:
            continue
        length, color, j = 0, 0, start
        while not seen[j]:
            seen[j] = True
            length += 1
            color += d[j]
            j = w[j]
        color %= r
        if length > 1 or color:
            rows[color].append(length)
    return ConjType(tuple(YoungDiagram(tuple(sorted(p, reverse=True))) for p in rows))


def _z(lam: YoungDiagram) -> int:
    return math.prod(j**m * math.factorial(m) for j, m in lam.multiplicities().items())


def class_size(rho: ConjType, n: int) -> int:
    """Number of elements of ``S_n(Z_r)`` with type ``rho`` (padded to degree ``n``)."""
    full = rho.padded(n)
    r = full.r
    denom = math.prod(_z(p) * r ** p.length for p in full.rows)
    size, rem = divmod(r**n * math.factorial(n), denom)
    assert rem == 0
    return size


def class_representative(rho: ConjType, n: int) -> WreathElement:
    """Consecutive cycles, each carrying its whole colour on its first slot."""
    full = rho.padded(n)
    colors = [0] * n
    perm = list(range(n))
    pos = 0
    for x, lam in enumerate(full.rows):
        for length in lam.parts:
            block = list(range(pos, pos + length))
            for a, b in zip(block, block[1:] + block[:1]):
                perm[a] = b
            colors[pos] = x
            pos += length
    return WreathElement(tuple(colors), tuple(perm))


def conjugacy_class(rho: ConjType, n: int) -> set[WreathElement]:
    """All elements of the class, found as a conjugation orbit under the generators."""
    r = rho.r
    start = class_representative(rho, n)
    gens = [(s, group_inverse(s, r)) for s in generators(n, r)]
    orbit = {start}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for s, s_inv in gens:
            h = group_multiply(group_multiply(s, g, r), s_inv, r)
            if h not in orbit:
                orbit.add(h)
                queue.append(h)
    return orbit


def conj_types(n: int, r: int) -> Iterator[ConjType]:
    """Every padded conjugacy type of ``S_n(Z_r)``."""
    from .diagrams import partitions

    def _split(rest: int, colors: int) -> Iterator[tuple[YoungDiagram, ...]]:
        if colors == 1:
            for lam in partitions(rest):
                yield (lam,)
            return
        for size in range(rest, -1, -1):
            for lam in partitions(size):
                for tail in _split(rest - size, colors - 1):
                    yield (lam,) + tail

    for rows in _split(n, r):
        yield ConjType(rows)


def reduced_types_upto(n: int, r: int) -> list[ConjType]:
    """Distinct reduced types whose padding fits in degree ``n``."""
    out: dict[ConjType, None] = {}
    for m in range(n + 1):
        for rho in conj_types(m, r):
            out.setdefault(rho.reduced(), None)
    return list(out)


# -- the group algebra -------------------------------------------------------


class AlgebraElement:
    """Sparse exact linear combination of elements of ``S_m(Z_r)``."""

    __slots__ = ("r", "degree", "_terms")

    def __init__(self, r: int, degree: int, terms: Mapping[WreathElement, object] | None = None):
        self.r = r
        self.degree = degree
        clean: dict[WreathElement, object] = {}
        for g, c in (terms or {}).items():
            if len(g.perm) != degree:
                raise ValueError("all terms must share the algebra's degree")
            if c:
                clean[g] = c
        self._terms = clean

    @classmethod
    def zero(cls, r: int, degree: int) -> "AlgebraElement":
        return cls(r, degree)

    @classmethod
    def identity(cls, r: int, degree: int) -> "AlgebraElement":
        return cls(r, degree, {identity_element(degree): 1})

    @classmethod
    def basis(cls, g: WreathElement, r: int, coefficient=1) -> "AlgebraElement":
        return cls(r, g.degree, {g: coefficient})

    @property
    def terms(self) -> Mapping[WreathElement, object]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, g: WreathElement):
        return self._terms.get(g, 0)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def _check(self, other: "AlgebraElement"):
        if self.degree != other.degree or self.r != other.r:
            raise ValueError(
                f"degree mismatch: S_{self.degree}(Z_{self.r}) vs S_{other.degree}(Z_{other.r})"
            )

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        out = dict(self._terms)
        for g, c in other._terms.items():
            out[g] = out.get(g, 0) + c
        return AlgebraElement(self.r, self.degree, out)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.r, self.degree, {g: -c for g, c in self._terms.items()})

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, c) -> "AlgebraElement":
        return AlgebraElement(self.r, self.degree, {g: c * v for g, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return (self.r, self.degree, self._terms) == (other.r, other.degree, other._terms)

    def __repr__(self) -> str:
        if not self._terms:
            return f"AlgebraElement(S_{self.degree}(Z_{self.r}), 0)"
        shown = sorted(self._terms.items())[:6]
        body = " + ".join(f"{c}*{g.colors}{g.perm}" for g, c in shown)
        more = "" if len(self._terms) <= 6 else f" + ... ({len(self._terms)} terms)"
        return f"AlgebraElement(S_{self.degree}(Z_{self.r}), {body}{more})"


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Bilinear extension of the group law."""
    a._check(b)
    r = a.r
    out: dict[WreathElement, object] = {}
    for g, cg in a._terms.items():
        for h, ch in b._terms.items():
            gh = group_multiply(g, h, r)
            out[gh] = out.get(gh, 0) + cg * ch
    return AlgebraElement(r, a.degree, out)


def commutes(a: AlgebraElement, g: WreathElement) -> bool:
    """Whether ``a`` commutes with the group element ``g``."""
    s = AlgebraElement.basis(g, a.r)
    return multiply(a, s) == multiply(s, a)


def is_central(a: AlgebraElement) -> bool:
    return all(commutes(a, s) for s in generators(a.degree, a.r))


def class_indicator(rho: ConjType, n: int) -> AlgebraElement:
    """Sum of all elements of the class ``rho`` in ``S_n(Z_r)``."""
    members = conjugacy_class(rho, n)
    return AlgebraElement(rho.r, n, {g: 1 for g in members})


def class_coefficients(a: AlgebraElement) -> dict[ConjType, object]:
    """Per-element coefficient of a central element on each conjugacy class.

    Raises ``ValueError`` when ``a`` is not constant on classes.
    """
    groups: dict[ConjType, list] = {}
    for g, c in a.items():
        groups.setdefault(conj_type_of(g, a.r), []).append(c)
    out: dict[ConjType, object] = {}
    for rho, coeffs in groups.items():
        if len(coeffs) != class_size(rho, a.degree) or any(c != coeffs[0] for c in coeffs):
            raise ValueError(f"element is not constant on the class {rho}")
        out[rho] = coeffs[0]
    return out


# -- JM elements and the restriction map ---------------------------------------


def jm_element(n: int, theta: int, r: int) -> AlgebraElement:
    """The JM element of ``S_{n+1}(Z_r)`` for colour ``theta``.

    Sum over slots ``i <= n`` and colours ``y`` of the element with colour
    ``-y`` at ``i``, ``theta + y`` at the last slot and permutation ``(i, n+1)``.
    """
    m = n + 1
    terms: dict[WreathElement, object] = {}
    for i in range(1, n + 1):
        perm = transposition(m, i, m)
        for y in range(r):
            colors = [0] * m
            colors[i - 1] = (-y) % r
            colors[n] = (theta + y) % r
            g = WreathElement(tuple(colors), perm)
            terms[g] = terms.get(g, 0) + 1
    return AlgebraElement(r, m, terms)


def last_slot_color(n: int, theta: int, r: int) -> AlgebraElement:
    """The element with colour ``theta`` on slot ``n+1`` and identity permutation."""
    colors = (0,) * n + (theta % r,)
    return AlgebraElement.basis(WreathElement(colors, tuple(range(n + 1))), r)


def restrict_E(a: AlgebraElement) -> AlgebraElement:
    """Keep terms fixing the last slot with colour 0 there, then drop that slot."""
    m = a.degree
    if m == 0:
        raise ValueError("cannot restrict an element of degree 0")
    out: dict[WreathElement, object] = {}
    for (d, w), c in a.items():
        if w[m - 1] == m - 1 and d[m - 1] == 0:
            g = WreathElement(d[:-1], w[:-1])
            out[g] = out.get(g, 0) + c
    return AlgebraElement(a.r, m - 1, out)


def check_budget(n: int, r: int, k: int, budget: int = DEFAULT_TERM_BUDGET) -> None:
    expanded = (n * r) ** k
    if expanded > budget:
        raise BudgetExceeded(
            f"expanding J^{k} in S_{n + 1}(Z_{r}) needs {expanded} terms, budget {budget}"
        )


@lru_cache(maxsize=64)
def _jm_power(n: int, r: int, k: int) -> AlgebraElement:
    if k == 0:
        return AlgebraElement.identity(r, n + 1)
    return multiply(_jm_power(n, r, k - 1), jm_element(n, 0, r))


def jm_power(n: int, r: int, k: int, budget: int = DEFAULT_TERM_BUDGET) -> AlgebraElement:
    """``J^k`` in ``S_{n+1}(Z_r)`` (memoised)."""
    check_budget(n, r, k, budget)
    return _jm_power(n, r, k)


def jm_moment_bruteforce(
    k: int, y: int, n: int, r: int, budget: int = DEFAULT_TERM_BUDGET
) -> AlgebraElement:
    """Exact ``E[J^k (y, (n+1))]`` in the algebra of ``S_n(Z_r)``.

    A term ``(d, w)`` of ``J^k`` survives the right multiplication by the last
    slot colour and ``E`` iff ``w`` fixes the last slot and ``d`` there is ``-y``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if n < 0:
        raise ValueError("n must be nonnegative")
    power = jm_power(n, r, k, budget)
    target = (-y) % r
    out: dict[WreathElement, object] = {}
    for (d, w), c in power.items():
        if w[n] == n and d[n] == target:
            g = WreathElement(d[:-1], w[:-1])
            out[g] = out.get(g, 0) + c
    return AlgebraElement(r, n, out)



__all__ = [
    "AbelianGroupSpec",
    "AlgebraElement",
    "BudgetExceeded",
    "ConjType",
    "DEFAULT_TERM_BUDGET",
    "WreathElement",
    "all_elements",
    "class_coefficients",
    "class_indicator",
    "class_representative",
    "class_size",
    "commutes",
    "conj_type_of",
    "conj_types",
    "conjugacy_class",
    "generators",
    "group_inverse",
    "group_multiply",
    "identity_element",
    "is_central",
    "jm_element",
    "jm_moment_bruteforce",
    "jm_power",
    "last_slot_color",
    "make_element",
    "multiply",
    "reduced_types_upto",
    "restrict_E",
    "transposition",
]

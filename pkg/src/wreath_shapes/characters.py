"""Irreducible characters of ``S_n(Z_r)``, Plancherel masses and the JM moment identity.

Irreducibles are labelled by multipartitions: one Young diagram per character
``zeta_a(x) = w^{a x}`` of ``Z_r``.  Values on a class are obtained by
distributing the coloured cycles of the class among the components and
multiplying symmetric-group characters (Murnaghan-Nakayama) with the values
of the component characters on the cycle colours.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .cyclotomic import CyclotomicNumber
from .diagrams import YoungDiagram, as_diagram, dim_sym, partitions
from .freeprob import moments, transition_measure
from .wreath_group import (
    DEFAULT_TERM_BUDGET,
    AlgebraElement,
    ConjType,
    conj_type_of,
    jm_moment_bruteforce,
)


@dataclass(frozen=True, order=True)
class MultiPartition:
    """One Young diagram per character of ``Z_r``; index ``a`` is ``zeta_a``."""

    components: tuple[YoungDiagram, ...]

    def __post_init__(self):
        comps = tuple(as_diagram(c) for c in self.components)
        if not comps:
            raise ValueError("a multipartition needs at least one component")
        object.__setattr__(self, "components", comps)

    @classmethod
    def single(cls, lam: YoungDiagram | Sequence[int], zeta: int, r: int) -> "MultiPartition":
        comps = [YoungDiagram(())] * r
        comps[zeta] = as_diagram(lam)
        return cls(tuple(comps))

    @classmethod
    def empty(cls, r: int) -> "MultiPartition":
        return cls((YoungDiagram(()),) * r)

    @classmethod
    def parse(cls, text: str) -> "MultiPartition":
        """Parse ``"(2,1)|()|(1)"``: components separated by ``|``."""
        comps = []
        for chunk in text.split("|"):
            chunk = chunk.strip().strip("()")
            parts = tuple(int(p) for p in chunk.split(",") if p.strip())
            comps.append(YoungDiagram(parts))
        return cls(tuple(comps))

    @property
    def r(self) -> int:
        return len(self.components)

    @property
    def n(self) -> int:
        return sum(c.size for c in self.components)

    def __getitem__(self, zeta: int) -> YoungDiagram:
        return self.components[zeta]

    def replace(self, zeta: int, lam: YoungDiagram) -> "MultiPartition":
        comps = list(self.components)
        comps[zeta] = lam
        return MultiPartition(tuple(comps))

    def __str__(self) -> str:
        return "|".join(str(c) for c in self.components)


def multipartitions(n: int, r: int) -> Iterator[MultiPartition]:
    """All multipartitions of total size ``n`` with ``r`` components."""

    def _gen(rest: int, slots: int) -> Iterator[tuple[YoungDiagram, ...]]:
        if slots == 1:
            for lam in partitions(rest):
                yield (lam,)
            return
        for size in range(rest, -1, -1):
            for lam in partitions(size):
                for tail in _gen(rest - size, slots - 1):
                    yield (lam,) + tail

    for comps in _gen(n, r):
        yield MultiPartition(comps)


# -- symmetric group characters ------------------------------------------------


def _beta(parts: tuple[int, ...]) -> tuple[int, ...]:
    L = len(parts)
    return tuple(p + L - 1 - i for i, p in enumerate(parts))


def _from_beta(beta: Iterable[int]) -> tuple[int, ...]:
    b = sorted(beta, reverse=True)
    L = len(b)
    return tuple(p for p in (x - (L - 1 - i) for i, x in enumerate(b)) if p > 0)


@lru_cache(maxsize=200_000)
def _char_with_fixed_points(parts: tuple[int, ...], hooks: tuple[int, ...]) -> int:
    """``chi^lam`` on the class with cycles ``hooks`` plus fixed points for the rest."""
    if not hooks:
        return dim_sym(YoungDiagram(parts))
    h, rest = hooks[0], hooks[1:]
    beta = _beta(parts)
    members = set(beta)
    total = 0
    for b in beta:
        target = b - h
        if target < 0 or target in members:
            continue
        height = sum(1 for c in beta if target < c < b)
        new = _from_beta([target if c == b else c for c in beta])
        value = _char_with_fixed_points(new, rest)
        total += -value if height % 2 else value
    return total


def sym_char(lam: YoungDiagram | Sequence[int], rho: YoungDiagram | Sequence[int]) -> int:
    """Irreducible character of ``S_|lam|`` at cycle type ``rho``."""
    lam, rho = as_diagram(lam), as_diagram(rho)
    if lam.size != rho.size:
        raise ValueError(f"size mismatch: |{lam}| = {lam.size}, |{rho}| = {rho.size}")
    hooks = tuple(p for p in rho.parts if p > 1)
    return _char_with_fixed_points(lam.parts, hooks)


def sigma_k(nu: YoungDiagram | Sequence[int], k: int) -> Fraction:
    """``|nu|(|nu|-1)...(|nu|-k+1) chi^nu(k-cycle) / dim nu``; zero when ``k > |nu|``."""
    nu = as_diagram(nu)
    if k < 1:
        raise ValueError("k must be at least 1")
    n = nu.size
    if k > n:
        return Fraction(0)
    hooks = (k,) if k > 1 else ()
    return Fraction(math.perm(n, k) * _char_with_fixed_points(nu.parts, hooks), dim_sym(nu))


# -- wreath characters ---------------------------------------------------------


def wreath_dim(lam: MultiPartition) -> int:
    n = lam.n
    out = math.factorial(n)
    for comp in lam.components:
        out = out * dim_sym(comp)
    for comp in lam.components:
        out //= math.factorial(comp.size)
    return out


def plancherel_mass(lam: MultiPartition) -> Fraction:
    return Fraction(wreath_dim(lam) ** 2, math.factorial(lam.n) * lam.r**lam.n)


def _colored_cycles(rho: ConjType) -> list[tuple[int, int]]:
    """(length, colour) of every cycle except colour-0 fixed points."""
    red = rho.reduced()
    return [(length, x) for x, p in enumerate(red.rows) for length in p.parts]


@lru_cache(maxsize=200_000)
def _wreath_char_powers(lam: MultiPartition, rho: ConjType) -> tuple[tuple[int, int], ...]:
    """Character value as ``((exponent, integer coefficient), ...)`` in powers of ``w_r``."""
    r = lam.r
    n = lam.n
    cycles = sorted(_colored_cycles(rho), reverse=True)
    fixed = n - sum(length for length, _ in cycles)
    if fixed < 0:
        raise ValueError(f"class {rho} does not fit in degree {n}")
    sizes = [c.size for c in lam.components]
    acc: dict[int, int] = {}
    assigned: list[list[int]] = [[] for _ in range(r)]
    caps = list(sizes)

    def _recurse(idx: int, exponent: int):
        if idx == len(cycles):
            # caps now hold the number of colour-0 fixed points given to each component
            coeff = math.factorial(fixed)
            for cap in caps:
                coeff //= math.factorial(cap)
            for zeta in range(r):
                if coeff == 0:
                    break
                # coloured fixed points stay as explicit 1-hooks
                hooks = tuple(sorted(assigned[zeta], reverse=True))
                coeff *= _char_with_fixed_points(lam.components[zeta].parts, hooks)
            if coeff:
                key = exponent % r
                acc[key] = acc.get(key, 0) + coeff
            return
        length, color = cycles[idx]
        for zeta in range(r):
            if caps[zeta] >= length:
                caps[zeta] -= length
                assigned[zeta].append(length)
                _recurse(idx + 1, exponent + zeta * color)
                assigned[zeta].pop()
                caps[zeta] += length

    _recurse(0, 0)
    return tuple(sorted(acc.items()))


def wreath_char(lam: MultiPartition, rho: ConjType) -> CyclotomicNumber:
    """Irreducible character ``chi^lam`` at the class ``rho`` (reduced or padded)."""
    if lam.r != rho.r:
        raise ValueError("multipartition and class use different colour groups")
    if rho.reduced().size > lam.n:
        raise ValueError(f"size mismatch: class {rho} does not fit in degree {lam.n}")
    return CyclotomicNumber.from_powers(lam.r, dict(_wreath_char_powers(lam, rho)))


def normalized_char(lam: MultiPartition, rho: ConjType) -> CyclotomicNumber:
    return wreath_char(lam, rho) / wreath_dim(lam)


def character_of_element(lam: MultiPartition, a: AlgebraElement) -> CyclotomicNumber:
    """Linear extension of ``chi^lam`` to the group algebra."""
    if a.degree != lam.n or a.r != lam.r:
        raise ValueError("algebra element and multipartition live in different groups")
    by_type: dict[ConjType, object] = {}
    for g, c in a.items():
        rho = conj_type_of(g, a.r)
        by_type[rho] = by_type.get(rho, 0) + c
    total = CyclotomicNumber.rational(lam.r, 0)
    for rho, c in by_type.items():
        if c:
            total = total + wreath_char(lam, rho) * Fraction(c)
    return total


def root_of_unity_value(zeta: int, x: int, r: int) -> CyclotomicNumber:
    """``zeta_a(x) = w^{a x}``."""
    return CyclotomicNumber.root_of_unity(r, zeta * x)


# -- validation of the character table ------------------------------------------


def orthogonality_holds(n: int, r: int) -> bool:
    """Row and column orthogonality of the full character table, weighted by class sizes."""
    from .wreath_group import class_size, conj_types

    order = math.factorial(n) * r**n
    lams = list(multipartitions(n, r))
    types = list(conj_types(n, r))
    if len(lams) != len(types):
        return False
    table = {(lam, rho): wreath_char(lam, rho) for lam in lams for rho in types}
    zero = CyclotomicNumber.rational(r, 0)
    for a in lams:
        for b in lams:
            total = sum(
                (table[a, rho] * table[b, rho].conjugate() * class_size(rho, n) for rho in types),
                zero,
            )
            if total != (order if a == b else 0):
                return False
    for rho in types:
        for tau in types:
            total = sum((table[lam, rho] * table[lam, tau].conjugate() for lam in lams), zero)
            expected = Fraction(order, class_size(rho, n)) if rho == tau else 0
            if total != expected:
                return False
    return True


def single_cycle_identity_holds(lam: MultiPartition, k: int, theta: int) -> bool:
    """Normalised value at a ``k``-cycle of colour ``theta`` against the component formula.

    ``chi^lam / dim lam = n^{-(k)} sum_a zeta_a(theta) Sigma_k(lam^a)``, with
    ``n^{-(k)}`` the inverse falling factorial.
    """
    n, r = lam.n, lam.r
    rho = ConjType.from_mapping(r, {theta: [k]})
    lhs = normalized_char(lam, rho)
    rhs = CyclotomicNumber.rational(r, 0)
    for a, comp in enumerate(lam.components):
        rhs = rhs + root_of_unity_value(a, theta, r) * sigma_k(comp, k)
    return lhs == rhs / math.perm(n, k)


def branching_holds(lam: MultiPartition) -> bool:
    """Restriction to degree ``n-1`` equals the sum over one-box-smaller multipartitions."""
    from .diagrams import removable_cells
    from .wreath_group import conj_types

    n, r = lam.n, lam.r
    below = [
        lam.replace(a, comp.remove_cell(row))
        for a, comp in enumerate(lam.components)
        for row, _, _ in removable_cells(comp)
    ]
    for rho in conj_types(n - 1, r):
        total = sum((wreath_char(nu, rho) for nu in below), CyclotomicNumber.rational(r, 0))
        if wreath_char(lam, rho) != total:
            return False
    return True


# -- the JM moment identity ----------------------------------------------------


@dataclass
class BianeReport:
    """Exact comparison of transition-measure moments with JM character values."""

    n: int
    k: int
    r: int
    lam: MultiPartition
    moments: dict[int, Fraction] = field(default_factory=dict)
    predicted_moments: dict[int, CyclotomicNumber] = field(default_factory=dict)
    character_values: dict[int, CyclotomicNumber] = field(default_factory=dict)
    predicted_character_values: dict[int, CyclotomicNumber] = field(default_factory=dict)

    @property
    def forward_ok(self) -> bool:
        return all(self.predicted_moments[z] == self.moments[z] for z in self.moments)

    @property
    def inverted_ok(self) -> bool:
        return all(
            self.predicted_character_values[t] == self.character_values[t]
            for t in self.character_values
        )

    @property
    def ok(self) -> bool:
        return self.forward_ok and self.inverted_ok

    def as_dict(self) -> dict:
        def _fmt(v):
            if isinstance(v, CyclotomicNumber):
                return str(v.to_rational()) if v.is_rational() else repr(v)
            return str(v)

        return {
            "n": self.n,
            "k": self.k,
            "r": self.r,
            "lambda": str(self.lam),
            "moments": {str(z): _fmt(v) for z, v in self.moments.items()},
            "predicted_moments": {str(z): _fmt(v) for z, v in self.predicted_moments.items()},
            "character_values": {str(t): _fmt(v) for t, v in self.character_values.items()},
            "predicted_character_values": {
                str(t): _fmt(v) for t, v in self.predicted_character_values.items()
            },
            "status": "pass" if self.ok else "fail",
        }


def verify_biane(
    n: int, k: int, r: int, lam: MultiPartition, budget: int = DEFAULT_TERM_BUDGET
) -> BianeReport:
    """Check both directions of the JM moment identity for one multipartition.

    Forward: ``M_k(m_{lam^a}) = r^{-k} sum_y chi(E[J^k (y)])/dim * conj(zeta_a(y))``.
    Inverted: ``chi(E[J^k (y)])/dim = r^{k-1} sum_a M_k(m_{lam^a}) zeta_a(y)``.
    """
    if lam.n != n or lam.r != r:
        raise ValueError("multipartition does not match (n, r)")
    if n < 1:
        raise ValueError("degree must be >= 1")
    report = BianeReport(n=n, k=k, r=r, lam=lam)
    dim = wreath_dim(lam)
    for y in range(r):
        a = jm_moment_bruteforce(k, y, n, r, budget)
        report.character_values[y] = character_of_element(lam, a) / dim
    for zeta in range(r):
        report.moments[zeta] = moments(transition_measure(lam[zeta]), k)[k]
    for zeta in range(r):
        total = CyclotomicNumber.rational(r, 0)
        for y in range(r):
            total = total + report.character_values[y] * root_of_unity_value(zeta, y, r).conjugate()
        report.predicted_moments[zeta] = total / r**k
    for y in range(r):
        total = CyclotomicNumber.rational(r, 0)
        for zeta in range(r):
            total = total + root_of_unity_value(zeta, y, r) * Fraction(report.moments[zeta])
        report.predicted_character_values[y] = total * r ** (k - 1)
    return report


__all__ = [
    "BianeReport",
    "MultiPartition",
    "branching_holds",
    "character_of_element",
    "multipartitions",
    "normalized_char",
    "orthogonality_holds",
    "plancherel_mass",
    "root_of_unity_value",
    "sigma_k",
    "single_cycle_identity_holds",
    "sym_char",
    "verify_biane",
    "wreath_char",
    "wreath_dim",
]

"""Exact arithmetic in the cyclotomic field ``Q(w_r)``, ``w_r = exp(2 pi i / r)``.

Elements are coefficient vectors in the power basis ``1, w, ..., w^{d-1}``
with ``d = deg Phi_r``, reduced modulo the r-th cyclotomic polynomial.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Integer polynomial division by a monic divisor; coefficients low order first."""
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    for shift in range(len(num) - len(den), -1, -1):
        c = num[shift + len(den) - 1]
        q[shift] = c
        if c:
            for i, d in enumerate(den):
                num[shift + i] -= c * d
    rem = num[: len(den) - 1]
    return q, rem


@lru_cache(maxsize=None)
def cyclotomic_polynomial(r: int) -> tuple[int, ...]:
    """Coefficients of ``Phi_r`` (low order first)."""
    if r < 1:
        raise ValueError("r must be positive")
    poly = [-1] + [0] * (r - 1) + [1]  # z^r - 1
    for d in range(1, r):
        if r % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_polynomial(d)))
            assert not any(rem)
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(r: int) -> tuple[tuple[int, ...], ...]:
    """Reduced coefficient vectors of ``w^j`` for ``j = 0 .. r-1``."""
    phi = cyclotomic_polynomial(r)
    d = len(phi) - 1
    out = []
    for j in range(r):
        mono = [0] * j + [1]
        if len(mono) <= d:
            out.append(tuple(mono + [0] * (d - len(mono))))
        else:
            _, rem = _poly_divmod(mono, list(phi))
            out.append(tuple(rem + [0] * (d - len(rem))))
    return tuple(out)


class CyclotomicNumber:
    """An element of ``Q(w_r)`` in canonical reduced form."""

    __slots__ = ("r", "coeffs")

    def __init__(self, r: int, coeffs):
        d = len(cyclotomic_polynomial(r)) - 1
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) > d:
            # fold with w^r = 1, then rewrite each w^j in the reduced basis
            folded = [Fraction(0)] * r
            for j, c in enumerate(coeffs):
                folded[j % r] += c
            coeffs = [Fraction(0)] * d
            for j, c in enumerate(folded):
                if c:
                    for i, b in enumerate(_power_table(r)[j]):
                        coeffs[i] += c * b
        self.r = r
        self.coeffs = tuple(coeffs + [Fraction(0)] * (d - len(coeffs)))

    @classmethod
    def root_of_unity(cls, r: int, j: int) -> "CyclotomicNumber":
        return cls(r, _power_table(r)[j % r])

    @classmethod
    def rational(cls, r: int, value) -> "CyclotomicNumber":
        return cls(r, [value])

    @classmethod
    def from_powers(cls, r: int, powers: dict[int, Rational]) -> "CyclotomicNumber":
        """``sum_j c_j w^j`` for a mapping ``{j: c_j}``."""
        d = len(cyclotomic_polynomial(r)) - 1
        coeffs = [Fraction(0)] * d
        table = _power_table(r)
        for j, c in powers.items():
            if c:
                for i, b in enumerate(table[j % r]):
                    if b:
                        coeffs[i] += c * b
        return cls(r, coeffs)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "CyclotomicNumber":
        if isinstance(other, CyclotomicNumber):
            if other.r != self.r:
                raise ValueError("cannot mix cyclotomic fields of different order")
            return other
        if isinstance(other, Rational):
            return CyclotomicNumber.rational(self.r, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CyclotomicNumber(self.r, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.r, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Rational):
            return CyclotomicNumber(self.r, [a * other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prod = [Fraction(0)] * (2 * len(self.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        return CyclotomicNumber(self.r, prod)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Rational):
            return CyclotomicNumber(self.r, [a / other for a in self.coeffs])
        return NotImplemented

    def conjugate(self) -> "CyclotomicNumber":
        """Complex conjugation, ``w -> w^{-1}``."""
        powers: dict[int, Fraction] = {}
        for j, c in enumerate(self.coeffs):
            if c:
                powers[(-j) % self.r] = powers.get((-j) % self.r, 0) + c
        return CyclotomicNumber.from_powers(self.r, powers)

    # -- comparison / conversion --------------------------------------------

    def __eq__(self, other):
        if isinstance(other, CyclotomicNumber):
            return self.r == other.r and self.coeffs == other.coeffs
        if isinstance(other, Rational):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.r, self.coeffs))

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def __complex__(self):
        w = cmath.exp(2j * math.pi / self.r)
        return complex(sum(float(c) * w**i for i, c in enumerate(self.coeffs)))

    def __repr__(self):
        if self.is_rational():
            return f"Cyclotomic[{self.r}]({self.coeffs[0]})"
        terms = [f"{c}*w^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"Cyclotomic[{self.r}](" + " + ".join(terms) + ")"

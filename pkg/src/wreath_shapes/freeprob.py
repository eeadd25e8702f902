"""Kerov transition measures, moments and free cumulants.

Exact arithmetic uses :class:`fractions.Fraction` throughout; measures coming
out of rescaled simulations carry floats and are flagged ``exact=False``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterator, Sequence

import numpy as np

from .diagrams import (
    RectangularProfile,
    YoungDiagram,
    addable_cells,
    as_diagram,
    dim_sym,
    partitions,
    profile,
)


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely supported probability with strictly increasing atoms."""

    atoms: tuple
    weights: tuple
    exact: bool = True

    def __post_init__(self):
        atoms, weights = tuple(self.atoms), tuple(self.weights)
        if len(atoms) != len(weights) or not atoms:
            raise ValueError("atoms and weights must be non-empty and of equal length")
        if any(atoms[i] >= atoms[i + 1] for i in range(len(atoms) - 1)):
            raise ValueError("atoms must be strictly increasing")
        if any(w <= 0 for w in weights):
            raise ValueError("weights must be positive")
        total = sum(weights)
        if self.exact:
            if not all(isinstance(v, Rational) for v in atoms + weights):
                raise TypeError("exact measures need rational atoms and weights")
            if total != 1:
                raise ValueError(f"weights sum to {total}, not 1")
        elif abs(float(total) - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {total}, not 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_floats(cls, atoms: Sequence[float], weights: Sequence[float]) -> "AtomicMeasure":
        w = np.asarray(weights, dtype=float)
        return cls(tuple(float(a) for a in atoms), tuple(float(x) for x in w / w.sum()), exact=False)

    def to_floats(self) -> "AtomicMeasure":
        return AtomicMeasure(
            tuple(float(a) for a in self.atoms), tuple(float(w) for w in self.weights), exact=False
        )

    def moment(self, k: int):
        return sum(w * a**k for a, w in zip(self.atoms, self.weights))

    def scaled(self, factor) -> "AtomicMeasure":
        """Push-forward under ``x -> factor * x`` (``factor > 0``)."""
        if self.exact and isinstance(factor, Rational):
            return AtomicMeasure(tuple(factor * a for a in self.atoms), self.weights)
        f = float(factor)
        return AtomicMeasure(
            tuple(f * float(a) for a in self.atoms),
            tuple(float(w) for w in self.weights),
            exact=False,
        )


DIRAC_ZERO = AtomicMeasure((Fraction(0),), (Fraction(1),))


def transition_measure(lam: YoungDiagram) -> AtomicMeasure:
    """Kerov's transition measure, weights ``dim mu / ((|lam|+1) dim lam)`` on corner contents."""
    lam = as_diagram(lam)
    denom = (lam.size + 1) * dim_sym(lam)
    atoms, weights = [], []
    for row, _, content in addable_cells(lam):
        atoms.append(Fraction(content))
        weights.append(Fraction(dim_sym(lam.add_cell(row)), denom))
    return AtomicMeasure(tuple(atoms), tuple(weights))


def profile_weights(p: RectangularProfile) -> list:
    """Residues of ``prod(z - y_j) / prod(z - x_i)`` at the valleys."""
    out = []
    for i, x in enumerate(p.valleys):
        num = math.prod((x - y for y in p.peaks), start=Fraction(1) if p.is_exact else 1.0)
        den = math.prod(
            (x - xl for l, xl in enumerate(p.valleys) if l != i),
            start=Fraction(1) if p.is_exact else 1.0,
        )
        out.append(num / den)
    return out


def measure_of_profile(p: RectangularProfile) -> AtomicMeasure:
    """Transition measure of a rectangular diagram through its rational function."""
    weights = profile_weights(p)
    if p.is_exact:
        return AtomicMeasure(tuple(Fraction(x) for x in p.valleys), tuple(weights))
    return AtomicMeasure.from_floats(p.valleys, weights)


def moments(m: AtomicMeasure, k: int) -> list:
    """``[M_0, M_1, ..., M_k]``; exact for exact measures."""
    if k < 0:
        raise ValueError("order must be non-negative")
    out = []
    powers = [Fraction(1) if m.exact else 1.0 for _ in m.atoms]
    for _ in range(k + 1):
        out.append(sum(w * p for w, p in zip(m.weights, powers)))
        powers = [p * a for p, a in zip(powers, m.atoms)]
    return out


# ---------------------------------------------------------------------------
# moment / free cumulant conversion


def _power_coefficient(cache: dict, seq: Sequence, s: int, j: int):
    """Coefficient of ``z^j`` in ``(sum_i seq[i] z^i)^s`` using only ``seq[:j+1]``."""
    key = (s, j)
    if key in cache:
        return cache[key]
    if s == 0:
        val = 1 if j == 0 else 0
    elif j == 0:
        val = seq[0] ** s
    else:
        val = sum(seq[i] * _power_coefficient(cache, seq, s - 1, j - i) for i in range(j + 1))
    cache[key] = val
    return val


def cumulants_to_moments(R: Sequence) -> list:
    """Moments ``[M_0=1, M_1, ..., M_K]`` from free cumulants ``[R_1, ..., R_K]``.

    Uses ``M(z) = 1 + sum_s R_s z^s M(z)^s`` coefficientwise.
    """
    R = list(R)
    M: list = [1]
    for n in range(1, len(R) + 1):
        cache: dict = {}
        M.append(
            sum(R[s - 1] * _power_coefficient(cache, M, s, n - s) for s in range(1, n + 1))
        )
    return M


def moments_to_cumulants(M: Sequence) -> list:
    """Inverse of :func:`cumulants_to_moments`; ``M[0]`` must equal 1."""
    M = list(M)
    if M[0] != 1:
        raise ValueError("M_0 must be 1")
    R: list = []
    for n in range(1, len(M)):
        cache: dict = {}
        lower = sum(R[s - 1] * _power_coefficient(cache, M, s, n - s) for s in range(1, n))
        # the s = n term is R_n * M_0^n
        R.append(M[n] - lower)
    return R


# ---------------------------------------------------------------------------
# non-crossing partitions


@dataclass(frozen=True)
class NoncrossingPartition:
    blocks: tuple[tuple[int, ...], ...]

    @property
    def type(self) -> YoungDiagram:
        return YoungDiagram(tuple(sorted((len(b) for b in self.blocks), reverse=True)))


def _set_partitions(k: int) -> Iterator[list[list[int]]]:
    if k == 0:
        yield []
        return
    for part in _set_partitions(k - 1):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [k]] + part[i + 1 :]
        yield part + [[k]]


def is_noncrossing(blocks: Sequence[Sequence[int]]) -> bool:
    label = {}
    for idx, block in enumerate(blocks):
        for e in block:
            label[e] = idx
    elems = sorted(label)
    for a_i, a in enumerate(elems):
        for b_i in range(a_i + 1, len(elems)):
            b = elems[b_i]
            if label[a] == label[b]:
                continue
            for c_i in range(b_i + 1, len(elems)):
                c = elems[c_i]
                if label[c] != label[a]:
                    continue
                for d in elems[c_i + 1 :]:
                    if label[d] == label[b]:
                        return False
    return True


@lru_cache(maxsize=None)
def nc_partitions(k: int) -> tuple[NoncrossingPartition, ...]:
    """All non-crossing partitions of ``{1, ..., k}`` by exhaustive filtering."""
    out = []
    for part in _set_partitions(k):
        if is_noncrossing(part):
            out.append(NoncrossingPartition(tuple(tuple(b) for b in sorted(part))))
    return tuple(out)


def nc_enumerate(sigma: YoungDiagram) -> list[NoncrossingPartition]:
    sigma = as_diagram(sigma)
    if sigma.size == 0:
        raise ValueError("block type must be non-empty")
    return [p for p in nc_partitions(sigma.size) if p.type == sigma]


def nc_count(sigma: YoungDiagram) -> int:
    """``k! / ((k - l + 1)! prod_j m_j!)`` non-crossing partitions with block type ``sigma``."""
    sigma = as_diagram(sigma)
    k, l = sigma.size, sigma.length
    if k == 0:
        raise ValueError("block type must be non-empty")
    denom = math.factorial(k - l + 1) * math.prod(
        math.factorial(m) for m in sigma.multiplicities().values()
    )
    return math.factorial(k) // denom


def moments_by_nc_sum(R: Sequence, K: int | None = None) -> list:
    """Oracle: ``M_k = sum_{pi in NC(k)} prod_B R_{|B|}`` by enumeration."""
    R = list(R)
    K = len(R) if K is None else K
    out: list = [1]
    for k in range(1, K + 1):
        total = 0
        for pi in nc_partitions(k):
            total += math.prod((R[len(b) - 1] for b in pi.blocks), start=1)
        out.append(total)
    return out


# ---------------------------------------------------------------------------
# Markov transform


class RootRefinementError(ArithmeticError):
    pass


def _numerator_value(m: AtomicMeasure, z: float) -> tuple[float, float]:
    atoms = [float(a) for a in m.atoms]
    val = der = 0.0
    for i, w in enumerate(m.weights):
        others = [z - a for j, a in enumerate(atoms) if j != i]
        prod = math.prod(others)
        val += float(w) * prod
        # derivative of a product of linear factors
        d = 0.0
        for j in range(len(others)):
            d += math.prod(others[:j] + others[j + 1 :])
        der += float(w) * d
    return val, der


def markov_inverse(m: AtomicMeasure, tol: float = 1e-12) -> RectangularProfile:
    """Rectangular diagram whose transition measure is ``m``.

    Peaks are the roots of ``N(z) = sum_i w_i prod_{j != i}(z - x_j)``, one
    bracketed between each pair of consecutive atoms.  For exact input the
    roots are rationalised and accepted only if the polynomial identity holds
    exactly.
    """
    atoms = m.atoms
    if len(atoms) == 1:
        return RectangularProfile(atoms, ())
    roots = []
    for lo, hi in zip(atoms[:-1], atoms[1:]):
        a, b = float(lo), float(hi)
        fa, _ = _numerator_value(m, a)
        for _ in range(200):
            mid = 0.5 * (a + b)
            fm, _ = _numerator_value(m, mid)
            if fm == 0.0:
                a = b = mid
                break
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b = mid
            if b - a <= tol * max(1.0, abs(mid)):
                break
        z = 0.5 * (a + b)
        val, der = _numerator_value(m, z)
        if der != 0.0:
            polished = z - val / der
            if float(lo) < polished < float(hi):
                z = polished
        width = b - a
        if width > 1e3 * tol * max(1.0, abs(z)):
            raise RootRefinementError(f"root in ({lo}, {hi}) not refined to {tol}")
        roots.append(z)
    if m.exact:
        exact_roots = _rationalise_roots(m, roots)
        if exact_roots is not None:
            return RectangularProfile(atoms, tuple(exact_roots))
    return RectangularProfile(tuple(float(a) for a in atoms), tuple(roots))


def _rationalise_roots(m: AtomicMeasure, roots: list[float]) -> list[Fraction] | None:
    cands = [Fraction(z).limit_denominator(10**6) for z in roots]
    if _poly_identity_holds(m, cands):
        return cands
    return None


def _poly_mul_linear(coeffs: list, root) -> list:
    """Multiply a coefficient list (low order first) by ``(z - root)``."""
    out = [0] * (len(coeffs) + 1)
    for i, c in enumerate(coeffs):
        out[i + 1] += c
        out[i] -= root * c
    return out


def numerator_coefficients(m: AtomicMeasure) -> list:
    """Exact coefficients of ``N(z)`` (low order first)."""
    total = [Fraction(0)] * len(m.atoms)
    for i, w in enumerate(m.weights):
        term = [w]
        for j, a in enumerate(m.atoms):
            if j != i:
                term = _poly_mul_linear(term, a)
        for d, c in enumerate(term):
            total[d] += c
    return total


def _poly_identity_holds(m: AtomicMeasure, peaks: Sequence) -> bool:
    lhs = [Fraction(1)]
    for y in peaks:
        lhs = _poly_mul_linear(lhs, y)
    rhs = numerator_coefficients(m)
    return list(lhs) == list(rhs)


def profile_identity_holds(p: RectangularProfile, m: AtomicMeasure) -> bool:
    """``prod(z - y_j) == N_m(z)`` and the valleys are the atoms, exactly."""
    return tuple(p.valleys) == tuple(m.atoms) and _poly_identity_holds(m, p.peaks)


# ---------------------------------------------------------------------------
# free cumulant dynamics


def evolve_cumulants(R0: Sequence, t: float, m: float, cardT: int) -> list[float]:
    """Free cumulants ``[R_1, ..., R_K]`` of the limit shape at macroscopic time ``t``.

    ``R_1 = 0``; ``R_2`` relaxes towards ``1/|T|`` at rate ``1/m``; ``R_{k+1}``
    decays as ``exp(-k t / m)`` for ``k >= 2``.
    """
    if t < 0 or m <= 0 or cardT < 1:
        raise ValueError("need t >= 0, m > 0, |T| >= 1")
    R0 = list(R0)
    decay = math.exp(-t / m)
    out = []
    for j, r in enumerate(R0, start=1):
        if j == 1:
            out.append(0.0)
        elif j == 2:
            out.append((1.0 - decay) / cardT + decay * float(r))
        else:
            out.append(math.exp(-(j - 1) * t / m) * float(r))
    return out


def free_compression(R: Sequence, c) -> list:
    """Cumulants of the free compression by a projection of trace ``c``."""
    return [c ** (k - 1) * r for k, r in enumerate(R, start=1)]


def semicircle_cumulants(variance, K: int) -> list:
    """``[R_1, ..., R_K]`` of the centred semicircle law."""
    zero = 0 * variance
    return [variance if k == 2 else zero for k in range(1, K + 1)]


def free_convolve(Ra: Sequence, Rb: Sequence) -> list:
    """Free additive convolution is additive in free cumulants."""
    return [a + b for a, b in zip(Ra, Rb)]


def evolve_by_free_convolution(R0: Sequence, t: float, m: float, cardT: int) -> list[float]:
    """Same law as :func:`evolve_cumulants`, built as compression plus semicircle."""
    c = math.exp(-t / m)
    K = len(R0)
    compressed = free_compression([float(r) for r in R0], c)
    compressed[0] = 0.0
    noise = free_compression(semicircle_cumulants(1.0 / cardT, K), 1.0 - c)
    return free_convolve(compressed, noise)


# ---------------------------------------------------------------------------
# quadrature on moment data


def gauss_quadrature(moments_seq: Sequence[float], nodes: int) -> AtomicMeasure:
    """``nodes``-point Gauss rule matching ``M_0 .. M_{2 nodes - 1}`` (Golub-Welsch).

    Recurrence coefficients come from the first ``nodes`` rows of the upper
    Cholesky factor of the Hankel matrix, so a measure with exactly ``nodes``
    atoms is recovered even though its next Hankel matrix is singular.
    """
    M = [float(x) for x in moments_seq]
    if len(M) < 2 * nodes:
        raise ValueError(f"need {2 * nodes} moments for {nodes} nodes")
    H = [[M[i + j] if i + j < len(M) else 0.0 for j in range(nodes + 1)] for i in range(nodes)]
    U = np.zeros((nodes, nodes + 1))
    for j in range(nodes):
        diag = H[j][j] - sum(U[i, j] ** 2 for i in range(j))
        if diag <= 1e-14 * max(1.0, abs(H[j][j])):
            raise ValueError(f"moments determine fewer than {nodes} nodes")
        U[j, j] = math.sqrt(diag)
        for c in range(j + 1, nodes + 1):
            U[j, c] = (H[j][c] - sum(U[i, j] * U[i, c] for i in range(j))) / U[j, j]
    alpha = np.empty(nodes)
    beta = np.empty(max(nodes - 1, 0))
    for j in range(nodes):
        alpha[j] = U[j, j + 1] / U[j, j] - (U[j - 1, j] / U[j - 1, j - 1] if j > 0 else 0.0)
    for j in range(nodes - 1):
        beta[j] = U[j + 1, j + 1] / U[j, j]
    J = np.diag(alpha) + np.diag(beta, 1) + np.diag(beta, -1)
    vals, vecs = np.linalg.eigh(J)
    weights = M[0] * vecs[0, :] ** 2
    order = np.argsort(vals)
    return AtomicMeasure.from_floats(vals[order], weights[order])


def all_diagrams_upto(n: int) -> Iterator[YoungDiagram]:
    for size in range(n + 1):
        yield from partitions(size)


__all__ = [
    "AtomicMeasure",
    "DIRAC_ZERO",
    "NoncrossingPartition",
    "RootRefinementError",
    "cumulants_to_moments",
    "evolve_by_free_convolution",
    "evolve_cumulants",
    "free_compression",
    "free_convolve",
    "gauss_quadrature",
    "markov_inverse",
    "measure_of_profile",
    "moments",
    "moments_by_nc_sum",
    "moments_to_cumulants",
    "nc_count",
    "nc_enumerate",
    "nc_partitions",
    "profile",
    "profile_identity_holds",
    "semicircle_cumulants",
    "transition_measure",
]

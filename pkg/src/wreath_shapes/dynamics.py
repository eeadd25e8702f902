"""Res-Ind chain on multipartitions, Plancherel sampling and diffusive-scale Monte Carlo.

One step restricts to ``S_{n-1}(Z_r)`` and induces back.  The step is sampled
in two stages without ever building the transition matrix:

* down: component ``a`` with probability ``|lam^a|/n``, then a corner of
  ``lam^a`` with the cotransition weight ``dim(lam^a - box)/dim lam^a``;
* up: a component uniformly, then an addable cell with the transition weight.

Continuous time comes from a renewal process of IID pausing times; at
macroscopic time ``t`` the chain is read at microscopic time ``t n``.  Each path
draws from ``numpy.random.default_rng([seed, path_index])`` so results do not
depend on how paths are scheduled on workers.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .characters import (
    MultiPartition,
    multipartitions,
    normalized_char,
    plancherel_mass,
    root_of_unity_value,
    wreath_char,
    wreath_dim,
)
from .cyclotomic import CyclotomicNumber
from .diagrams import YoungDiagram, removable_cells
from .freeprob import cumulants_to_moments, evolve_cumulants, moments_to_cumulants, nc_count
from .wreath_group import BudgetExceeded, ConjType

THREADS_ENV = "WREATH_SHAPES_THREADS"
DEFAULT_MAX_STATES = 200


# -- pausing times -------------------------------------------------------------


@dataclass(frozen=True)
class PausingSpec:
    """IID holding times between chain steps.

    ``family`` is ``exponential``, ``gamma`` (``shape`` parameter) or ``table``
    (finitely many ``values`` with ``probs``).
    """

    family: str = "exponential"
    mean: float = 1.0
    shape: float = 2.0
    values: tuple[float, ...] = ()
    probs: tuple[float, ...] = ()

    def __post_init__(self):
        if self.family not in ("exponential", "gamma", "table"):
            raise ValueError(f"unknown pausing family {self.family!r}")
        if self.family == "table":
            if len(self.values) != len(self.probs) or not self.values:
                raise ValueError("table pausing needs matching values and probs")
            if any(v <= 0 for v in self.values) or any(p < 0 for p in self.probs):
                raise ValueError("table values must be positive, probs nonnegative")
            if not math.isclose(sum(self.probs), 1.0, rel_tol=1e-12):
                raise ValueError("table probs must sum to 1")
            object.__setattr__(
                self, "mean", float(sum(v * p for v, p in zip(self.values, self.probs)))
            )
        if not (self.mean > 0 and math.isfinite(self.mean)):
            raise ValueError("pausing mean must be finite and positive")
        if self.family == "gamma" and self.shape <= 0:
            raise ValueError("gamma shape must be positive")

    @property
    def smooth_characteristic_function(self) -> bool:
        """Whether ``|phi(xi)/xi|`` is integrable away from 0.

        Exponential and gamma laws have ``|phi(xi)| ~ |xi|^{-shape}``; a finite
        table has a periodic characteristic function and does not qualify.
        """
        return self.family in ("exponential", "gamma")

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.family == "exponential":
            return rng.exponential(self.mean, size)
        if self.family == "gamma":
            return rng.gamma(self.shape, self.mean / self.shape, size)
        return rng.choice(np.asarray(self.values), size=size, p=np.asarray(self.probs))

    def counts(self, times: Sequence[float], rng: np.random.Generator) -> list[int]:
        """Renewal counts ``N_s`` at increasing microscopic times ``s``."""
        times = [float(s) for s in times]
        if any(s < 0 for s in times) or any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("times must be nonnegative and nondecreasing")
        if not times:
            return []
        if self.family == "exponential":
            out, total, prev = [], 0, 0.0
            for s in times:
                total += int(rng.poisson((s - prev) / self.mean)) if s > prev else 0
                out.append(total)
                prev = s
            return out
        horizon = times[-1]
        arrivals = np.empty(0)
        elapsed = 0.0
        while elapsed <= horizon:
            batch = self.draw(rng, int((horizon - elapsed) / self.mean * 1.2) + 16)
            stamps = elapsed + np.cumsum(batch)
            arrivals = np.concatenate([arrivals, stamps])
            elapsed = float(stamps[-1])
        return [int(np.searchsorted(arrivals, s, side="right")) for s in times]


def a_coefficient(
    k: int,
    n: int,
    s: float,
    pausing: PausingSpec,
    samples: int = 10_000,
    seed: int = 0,
) -> tuple[float, float]:
    """``a(k, n, s) = E[(1 - k/n)^{N_s}]`` as ``(value, standard error)``.

    Exponential pausing has the Poisson closed form ``exp(-k s/(n m))`` with zero
    error; other families are estimated by Monte Carlo.
    """
    if not 0 <= k < n:
        raise ValueError("need 0 <= k < n")
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s == 0:
        return 1.0, 0.0
    if pausing.family == "exponential":
        return math.exp(-k * s / (n * pausing.mean)), 0.0
    q = 1.0 - k / n
    values = np.empty(samples)
    for i in range(samples):
        rng = np.random.default_rng([seed, i])
        values[i] = q ** pausing.counts([s], rng)[0]
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(samples))


# -- corner weights ------------------------------------------------------------


def _valleys(parts: Sequence[int]) -> list[tuple[int, int]]:
    """``(row, content)`` of addable cells, 0-based rows."""
    L = len(parts)
    out = [(L, -L)]
    for i in range(L - 1, -1, -1):
        if i == 0 or parts[i - 1] > parts[i]:
            out.append((i, parts[i] - i))
    return out


def _peaks(parts: Sequence[int]) -> list[tuple[int, int]]:
    """``(row, content)`` of removable cells, 0-based rows."""
    L = len(parts)
    out = []
    for i in range(L - 1, -1, -1):
        if i == L - 1 or parts[i] > parts[i + 1]:
            out.append((i, parts[i] - 1 - i))
    return out


def up_weights(parts: Sequence[int]) -> list[tuple[int, int, int]]:
    """``(row, numerator, denominator)`` of the transition weight of each addable cell."""
    xs = _valleys(parts)
    ys = [c for _, c in _peaks(parts)]
    out = []
    for i, (row, x) in enumerate(xs):
        num = math.prod(x - y for y in ys)
        den = math.prod(x - x2 for j, (_, x2) in enumerate(xs) if j != i)
        if den < 0:
            num, den = -num, -den
        out.append((row, num, den))
    return out


def down_weights(parts: Sequence[int]) -> list[tuple[int, int, int]]:
    """``(row, numerator, denominator)`` of ``dim(lam - box)/dim lam`` for each corner."""
    xs = [c for _, c in _valleys(parts)]
    ps = _peaks(parts)
    size = sum(parts)
    out = []
    for j, (row, y) in enumerate(ps):
        num = -math.prod(y - x for x in xs)
        den = math.prod(y - y2 for l, (_, y2) in enumerate(ps) if l != j) * size
        if den < 0:
            num, den = -num, -den
        out.append((row, num, den))
    return out


def _pick(weights: list[tuple[int, int, int]], u: float) -> int:
    acc = 0.0
    for row, num, den in weights:
        acc += num / den
        if u < acc:
            return row
    return weights[-1][0]


def _add(parts: list[int], row: int) -> None:
    if row == len(parts):
        parts.append(1)
    else:
        parts[row] += 1


def _remove(parts: list[int], row: int) -> None:
    parts[row] -= 1
    if parts[row] == 0:
        parts.pop()


def _down(comps: list[list[int]], rng: np.random.Generator) -> None:
    n = sum(sum(c) for c in comps)
    u = rng.random() * n
    acc = 0
    for comp in comps:
        acc += sum(comp)
        if u < acc:
            break
    _remove(comp, _pick(down_weights(comp), rng.random()))


def _up(comps: list[list[int]], rng: np.random.Generator) -> None:
    comp = comps[int(rng.integers(len(comps)))]
    _add(comp, _pick(up_weights(comp), rng.random()))


def _freeze(comps: list[list[int]]) -> MultiPartition:
    return MultiPartition(tuple(YoungDiagram(tuple(c)) for c in comps))


def _thaw(lam: MultiPartition) -> list[list[int]]:
    return [list(c.parts) for c in lam.components]


# -- exact kernels -------------------------------------------------------------


def down_probabilities(lam: MultiPartition) -> dict[MultiPartition, Fraction]:
    """Exact first-stage probabilities ``dim nu / dim lam``."""
    n = lam.n
    out: dict[MultiPartition, Fraction] = {}
    for a, comp in enumerate(lam.components):
        if not comp.parts:
            continue
        for row, num, den in down_weights(comp.parts):
            nu = lam.replace(a, comp.remove_cell(row + 1))
            out[nu] = out.get(nu, Fraction(0)) + Fraction(comp.size, n) * Fraction(num, den)
    return out


def up_probabilities(nu: MultiPartition) -> dict[MultiPartition, Fraction]:
    """Exact second-stage probabilities ``dim mu / (n r dim nu)``."""
    r = nu.r
    out: dict[MultiPartition, Fraction] = {}
    for a, comp in enumerate(nu.components):
        for row, num, den in up_weights(comp.parts):
            mu = nu.replace(a, comp.add_cell(row + 1))
            out[mu] = out.get(mu, Fraction(0)) + Fraction(num, den * r)
    return out


@dataclass
class TransitionMatrix:
    states: list[MultiPartition]
    P: list[list[Fraction]]

    def index(self, lam: MultiPartition) -> int:
        return self.states.index(lam)

    def apply(self, v: Sequence) -> list:
        """``P v`` for a column vector indexed by ``states``."""
        out = []
        for row in self.P:
            total = 0
            for p, x in zip(row, v):
                if p:
                    total = x * p + total
            out.append(total)
        return out


def transition_matrix(n: int, r: int, max_states: int = DEFAULT_MAX_STATES) -> TransitionMatrix:
    """Exact Res-Ind matrix ``P[lam][mu] = sum_nu dim mu / (n r dim lam)``."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    states = list(multipartitions(n, r))
    if len(states) > max_states:
        raise BudgetExceeded(f"{len(states)} states exceed the budget of {max_states}")
    idx = {lam: i for i, lam in enumerate(states)}
    dims = {lam: wreath_dim(lam) for lam in states}
    below: dict[MultiPartition, list[MultiPartition]] = {}
    for lam in states:
        below[lam] = [
            lam.replace(a, comp.remove_cell(row))
            for a, comp in enumerate(lam.components)
            for row, _, _ in removable_cells(comp)
        ]
    P = [[Fraction(0)] * len(states) for _ in states]
    for lam in states:
        covers_lam = set(below[lam])
        for mu in states:
            common = sum(1 for nu in set(below[mu]) if nu in covers_lam)
            if common:
                P[idx[lam]][idx[mu]] = Fraction(common * dims[mu], n * r * dims[lam])
    return TransitionMatrix(states, P)


# -- sampling ------------------------------------------------------------------


@dataclass(frozen=True)
class ChainState:
    current: MultiPartition
    stream: int = 0
    time: float = 0.0
    steps: int = 0


def step_sample(state: ChainState, rng: np.random.Generator) -> ChainState:
    """One Res-Ind step."""
    comps = _thaw(state.current)
    _down(comps, rng)
    _up(comps, rng)
    return ChainState(_freeze(comps), state.stream, state.time, state.steps + 1)


def plancherel_sample(n: int, r: int, rng: np.random.Generator) -> MultiPartition:
    """Plancherel-distributed multipartition grown by ``n`` up steps from the empty one."""
    comps: list[list[int]] = [[] for _ in range(r)]
    for _ in range(n):
        _up(comps, rng)
    return _freeze(comps)


def sample_path(
    initial: MultiPartition, s: float, pausing: PausingSpec, rng: np.random.Generator
) -> ChainState:
    """The chain read at microscopic time ``s``."""
    return sample_path_times(initial, [s], pausing, rng)[0]


def sample_path_times(
    initial: MultiPartition,
    times: Sequence[float],
    pausing: PausingSpec,
    rng: np.random.Generator,
    stream: int = 0,
) -> list[ChainState]:
    """States at increasing microscopic times along one path."""
    counts = pausing.counts(times, rng)
    comps = _thaw(initial)
    out, done = [], 0
    for s, target in zip(times, counts):
        while done < target:
            _down(comps, rng)
            _up(comps, rng)
            done += 1
        out.append(ChainState(_freeze(comps), stream, float(s), done))
    return out


# -- ensembles -----------------------------------------------------------------


@dataclass(frozen=True)
class Ensemble:
    """Initial distribution: ``plancherel``, a ``fixed`` multipartition, or a ``mixture``."""

    kind: str
    states: tuple[MultiPartition, ...] = ()
    weights: tuple[float, ...] = ()

    @classmethod
    def plancherel(cls) -> "Ensemble":
        return cls("plancherel")

    @classmethod
    def fixed(cls, lam: MultiPartition) -> "Ensemble":
        return cls("fixed", (lam,), (1.0,))

    @classmethod
    def rectangle(cls, rows: int, cols: int, zeta: int, r: int) -> "Ensemble":
        return cls.fixed(MultiPartition.single((cols,) * rows, zeta, r))

    @classmethod
    def mixture(cls, items: Iterable[tuple[float, MultiPartition]]) -> "Ensemble":
        items = list(items)
        total = sum(w for w, _ in items)
        if total <= 0 or any(w < 0 for w, _ in items):
            raise ValueError("mixture weights must be nonnegative with positive sum")
        sizes = {lam.n for _, lam in items}
        if len(sizes) != 1:
            raise ValueError("mixture components must have the same size")
        return cls("mixture", tuple(l for _, l in items), tuple(w / total for w, _ in items))

    @classmethod
    def parse(cls, text: str, r: int) -> "Ensemble":
        """``plancherel``, ``rectangle:PxQ@ZETA``, ``(2,1)|(1)`` or ``0.5*(2)|();0.5*()|(2)``."""
        text = text.strip()
        if text == "plancherel":
            return cls.plancherel()
        if text.startswith("rectangle:"):
            body = text[len("rectangle:") :]
            dims, _, zeta = body.partition("@")
            p, _, q = dims.partition("x")
            return cls.rectangle(int(p), int(q), int(zeta or 0), r)
        if ";" in text or "*" in text:
            items = []
            for chunk in text.split(";"):
                w, _, lam = chunk.partition("*")
                items.append((float(w), MultiPartition.parse(lam)))
            return cls.mixture(items)
        return cls.fixed(MultiPartition.parse(text))

    def check(self, n: int, r: int) -> None:
        for lam in self.states:
            if lam.n != n or lam.r != r:
                raise ValueError(f"initial state {lam} does not lie in degree {n} with {r} colours")

    def sample(self, n: int, r: int, rng: np.random.Generator) -> MultiPartition:
        if self.kind == "plancherel":
            return plancherel_sample(n, r, rng)
        if len(self.states) == 1:
            return self.states[0]
        return self.states[int(rng.choice(len(self.states), p=np.asarray(self.weights)))]

    def __str__(self) -> str:
        if self.kind == "plancherel":
            return "plancherel"
        if self.kind == "fixed":
            return str(self.states[0])
        return ";".join(f"{w:g}*{lam}" for w, lam in zip(self.weights, self.states))


# -- Monte Carlo moments -------------------------------------------------------


def component_moments(lam: YoungDiagram | Sequence[int], K: int) -> list[Fraction]:
    """Exact ``[M_0 .. M_K]`` of the transition measure, via corner weights."""
    parts = lam.parts if isinstance(lam, YoungDiagram) else tuple(lam)
    out = [Fraction(0)] * (K + 1)
    for row, num, den in up_weights(parts):
        x = parts[row] - row if row < len(parts) else -len(parts)
        w = Fraction(num, den)
        power = Fraction(1)
        for j in range(K + 1):
            out[j] += w * power
            power *= x
    return out


def rescaled_moments(lam: MultiPartition, K: int) -> list[list[float]]:
    """Per component, ``n^{-k/2} M_k`` for ``k = 0..K``  (``n`` the total size)."""
    n = lam.n
    out = []
    for comp in lam.components:
        exact = component_moments(comp, K)
        out.append([float(m) / n ** (k / 2) for k, m in enumerate(exact)])
    return out


@dataclass(frozen=True)
class MomentEstimate:
    value: float
    stderr: float
    samples: int
    t: float
    k: int
    zeta: int
    per_path: tuple[float, ...] = field(default=(), repr=False)

    @property
    def variance(self) -> float:
        """Per-path sample variance."""
        if self.samples < 2:
            return 0.0
        return float(np.var(np.asarray(self.per_path), ddof=1))


@dataclass(frozen=True)
class SimulationConfig:
    n: int
    r: int
    ensemble: Ensemble
    times: tuple[float, ...]
    orders: tuple[int, ...]
    paths: int
    pausing: PausingSpec = PausingSpec()
    seed: int = 0
    workers: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("degree must be >= 1")
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.paths < 1:
            raise ValueError("paths must be >= 1")
        if any(t < 0 for t in self.times) or not self.times:
            raise ValueError("times must be a nonempty list of nonnegative numbers")
        if not self.orders or any(k < 1 for k in self.orders):
            raise ValueError("orders must be a nonempty list of positive integers")
        self.ensemble.check(self.n, self.r)


def resolve_workers(workers: int | None = None) -> int:
    """Explicit count, capped by the ``WREATH_SHAPES_THREADS`` environment variable."""
    cap = os.environ.get(THREADS_ENV)
    count = workers if workers is not None else (os.cpu_count() or 1)
    if cap:
        try:
            count = min(count, max(1, int(cap)))
        except ValueError as exc:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {cap!r}") from exc
    return max(1, count)


def _path_moments(cfg: SimulationConfig, index: int) -> list[list[list[float]]]:
    """``[time][zeta][k]`` rescaled moments for one path."""
    rng = np.random.default_rng([cfg.seed, index])
    start = cfg.ensemble.sample(cfg.n, cfg.r, rng)
    order = sorted(range(len(cfg.times)), key=lambda i: cfg.times[i])
    micro = [cfg.times[i] * cfg.n for i in order]
    states = sample_path_times(start, micro, cfg.pausing, rng, stream=index)
    K = max(cfg.orders)
    out: list = [None] * len(cfg.times)
    for i, state in zip(order, states):
        out[i] = rescaled_moments(state.current, K)
    return out


def _run_chunk(args) -> list:
    cfg, indices = args
    return [_path_moments(cfg, i) for i in indices]


def _map_paths(cfg: SimulationConfig, fn=_run_chunk) -> list:
    """Per-path results in path order, computed on a process pool."""
    workers = min(resolve_workers(cfg.workers), cfg.paths)
    if workers <= 1:
        return fn((cfg, range(cfg.paths)))
    chunks = np.array_split(np.arange(cfg.paths), workers * 4)
    jobs = [(cfg, [int(i) for i in c]) for c in chunks if len(c)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(fn, jobs))
    return [item for chunk in results for item in chunk]


def simulate_moments(cfg: SimulationConfig) -> list[list[list[list[float]]]]:
    """``[path][time][zeta][k]`` rescaled moments."""
    return _map_paths(cfg)


def _estimate(values: np.ndarray, t: float, k: int, zeta: int) -> MomentEstimate:
    n = len(values)
    se = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return MomentEstimate(float(values.mean()), se, n, t, k, zeta, tuple(float(v) for v in values))


def estimate_rescaled_moments(cfg: SimulationConfig) -> list[MomentEstimate]:
    """Means of ``n^{-k/2} M_k(m_{lam^zeta})`` at each ``(t, k, zeta)``."""
    data = np.asarray(simulate_moments(cfg))  # path, time, zeta, k
    out = []
    for ti, t in enumerate(cfg.times):
        for zeta in range(cfg.r):
            for k in cfg.orders:
                out.append(_estimate(data[:, ti, zeta, k], t, k, zeta))
    return out


@dataclass(frozen=True)
class CumulantEstimate:
    value: float
    stderr: float
    t: float
    k: int
    zeta: int


def estimate_cumulants(
    data: np.ndarray, times: Sequence[float], K: int
) -> list[CumulantEstimate]:
    """Free cumulants of path-averaged moments with jackknife errors.

    ``data`` has shape ``(paths, times, zeta, k)`` as from :func:`simulate_moments`.
    """
    paths = data.shape[0]
    out = []
    for ti, t in enumerate(times):
        for zeta in range(data.shape[2]):
            sample = data[:, ti, zeta, : K + 1]
            full = moments_to_cumulants(list(sample.mean(axis=0)))
            if paths > 1:
                total = sample.sum(axis=0)
                loo = np.array(
                    [moments_to_cumulants(list((total - sample[i]) / (paths - 1))) for i in range(paths)]
                )
                se = np.sqrt((paths - 1) / paths * ((loo - loo.mean(axis=0)) ** 2).sum(axis=0))
            else:
                se = np.zeros(K)
            for k in range(1, K + 1):
                out.append(CumulantEstimate(float(full[k - 1]), float(se[k - 1]), t, k, zeta))
    return out


# -- predictions ---------------------------------------------------------------


@dataclass(frozen=True)
class InitialCycleLimits:
    """Limits ``gamma[(x, k)]`` of ``n^{(k-1)/2}`` times normalised ``(x, k)``-cycle values."""

    r: int
    gamma: dict
    growth_ok: bool = True

    def __post_init__(self):
        if complex(self.gamma.get((0, 2), 1)) != 1:
            raise ValueError("the (0, 2)-cycle limit must be 1")

    @classmethod
    def plancherel(cls, r: int) -> "InitialCycleLimits":
        return cls(r, {(0, 2): 1.0})

    def value(self, x: int, k: int) -> complex:
        if (x % self.r, k) == (0, 2):
            return 1.0
        return complex(self.gamma.get((x % self.r, k), 0.0))

    def cumulants(self, zeta: int, K: int) -> list[float]:
        """``R_j = r^{-1} sum_x gamma_j^x conj(zeta(x))`` for ``j = 1 .. K``."""
        out = [0.0]
        for j in range(2, K + 1):
            total = sum(
                self.value(x, j) * complex(root_of_unity_value(zeta, x, self.r).conjugate())
                for x in range(self.r)
            ) / self.r
            if abs(total.imag) > 1e-12 * max(1.0, abs(total)):
                raise ValueError("cycle limits are not conjugation symmetric")
            out.append(total.real)
        return out


def initial_cumulants(ensemble: Ensemble, n: int, r: int, K: int) -> dict[int, list[float]]:
    """Free cumulants ``R_1 .. R_K`` per component of the rescaled initial ensemble.

    Plancherel uses its limit (semicircle of variance ``1/r``); deterministic and
    mixture starts use exact path-averaged moments at degree ``n``.
    """
    if ensemble.kind == "plancherel":
        limits = InitialCycleLimits.plancherel(r)
        return {z: limits.cumulants(z, K) for z in range(r)}
    avg = [[0.0] * (K + 1) for _ in range(r)]
    for w, lam in zip(ensemble.weights, ensemble.states):
        for z, row in enumerate(rescaled_moments(lam, K)):
            for k in range(K + 1):
                avg[z][k] += w * row[k]
    return {z: moments_to_cumulants(avg[z]) for z in range(r)}


@dataclass(frozen=True)
class Prediction:
    cumulants: dict[int, list[float]]
    moments: dict[int, list[float]]


def predicted_cumulants(
    initial: dict[int, Sequence[float]] | InitialCycleLimits, t: float, m: float, r: int, K: int | None = None
) -> Prediction:
    """Evolved free cumulants and the corresponding moments ``[M_0 .. M_K]`` per component."""
    if isinstance(initial, InitialCycleLimits):
        if K is None:
            K = max([k for _, k in initial.gamma] + [4])
        R0 = {z: initial.cumulants(z, K) for z in range(r)}
    else:
        R0 = {z: list(v) for z, v in initial.items()}
    cums = {z: evolve_cumulants(R, t, m, r) for z, R in R0.items()}
    moms = {z: [float(x) for x in cumulants_to_moments(R)] for z, R in cums.items()}
    return Prediction(cums, moms)


def moments_by_shape_sum(R: Sequence[float], K: int) -> list[float]:
    """``M_k = sum over shapes sigma of size k without 1-rows of |NC(sigma)| prod R_j^{m_j}``.

    Valid when ``R_1 = 0``; used as an independent check of the moment prediction.
    """
    from .jm_asymptotics import reduced_shapes

    out = [1.0]
    for k in range(1, K + 1):
        total = 0.0
        for shape in reduced_shapes(k):
            term = float(nc_count(shape.sigma))
            for j, mult in shape.sigma.multiplicities().items():
                term *= float(R[j - 1]) ** mult
            total += term
        out.append(total)
    return out


# -- exact spectral and factorisation checks -----------------------------------


@dataclass
class EigenReport:
    n: int
    r: int
    rho: ConjType
    eigenvalue: Fraction
    ok: bool
    vector: list[CyclotomicNumber]

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "class": str(self.rho),
            "eigenvalue": str(self.eigenvalue),
            "status": "pass" if self.ok else "fail",
        }


def eigen_check(n: int, r: int, rho: ConjType, matrix: TransitionMatrix | None = None) -> EigenReport:
    """Normalised characters at ``rho`` form an eigenvector with eigenvalue ``1 - |supp|/n``."""
    if rho.reduced().size > n:
        raise ValueError(f"class {rho} does not fit in degree {n}")
    P = matrix or transition_matrix(n, r)
    v = [normalized_char(lam, rho) for lam in P.states]
    eigenvalue = 1 - Fraction(rho.support_size, n)
    Pv = P.apply(v)
    ok = all(a == b * eigenvalue for a, b in zip(Pv, v))
    return EigenReport(n, r, rho, eigenvalue, ok, v)


def reversibility_holds(P: TransitionMatrix) -> bool:
    """Detailed balance with respect to the Plancherel masses."""
    mass = [plancherel_mass(lam) for lam in P.states]
    size = len(P.states)
    return all(
        mass[i] * P.P[i][j] == mass[j] * P.P[j][i] for i in range(size) for j in range(i, size)
    )


def _merge_types(g: ConjType, h: ConjType) -> ConjType:
    g, h = g.reduced(), h.reduced()
    if g.r != h.r:
        raise ValueError("types over different colour groups")
    return ConjType(
        tuple(
            YoungDiagram(tuple(sorted(a.parts + b.parts, reverse=True)))
            for a, b in zip(g.rows, h.rows)
        )
    )


@dataclass(frozen=True)
class AFPEstimate:
    defect: float
    stderr: float
    scaled_defect: float
    scaled_stderr: float
    samples: int
    exact: bool


def _real(c: CyclotomicNumber) -> float:
    return complex(c).real


def _char_values_chunk(args) -> list:
    cfg, indices, types = args
    out = []
    for i in indices:
        rng = np.random.default_rng([cfg.seed, i])
        start = cfg.ensemble.sample(cfg.n, cfg.r, rng)
        state = sample_path_times(start, [cfg.times[0] * cfg.n], cfg.pausing, rng, stream=i)[0]
        lam = state.current
        dim = wreath_dim(lam)
        out.append([complex(wreath_char(lam, rho)) / dim for rho in types])
    return out


def character_averages(cfg: SimulationConfig, types: Sequence[ConjType]) -> np.ndarray:
    """Per-path normalised character values ``[path][type]`` at time ``cfg.times[0]``."""
    workers = min(resolve_workers(cfg.workers), cfg.paths)
    if workers <= 1:
        return np.asarray(_char_values_chunk((cfg, range(cfg.paths), list(types))))
    chunks = np.array_split(np.arange(cfg.paths), workers * 4)
    jobs = [(cfg, [int(i) for i in c], list(types)) for c in chunks if len(c)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_char_values_chunk, jobs))
    return np.asarray([item for chunk in results for item in chunk])


def afp_probe(cfg: SimulationConfig, g_type: ConjType, h_type: ConjType) -> AFPEstimate:
    """``f(gh) - f(g) f(h)`` for disjointly supported ``g``, ``h`` at time ``cfg.times[0]``.

    ``f`` averages normalised characters over the chain's law.  The Plancherel
    law is stationary and its ``f`` is the indicator of the identity, so the
    defect is returned exactly.
    """
    gh = _merge_types(g_type, h_type)
    if gh.size > cfg.n:
        raise ValueError("g and h need disjoint supports inside the degree")
    scale = cfg.n ** (
        ((g_type.reduced().size - g_type.reduced().length) + (h_type.reduced().size - h_type.reduced().length))
        / 2
    )
    if cfg.ensemble.kind == "plancherel":
        def delta(rho: ConjType) -> int:
            return 1 if rho.reduced().size == 0 else 0

        defect = float(delta(gh) - delta(g_type) * delta(h_type))
        return AFPEstimate(defect, 0.0, scale * defect, 0.0, 0, True)
    vals = character_averages(cfg, [gh, g_type, h_type]).real
    paths = vals.shape[0]
    mean = vals.mean(axis=0)
    defect = float(mean[0] - mean[1] * mean[2])
    if paths > 1:
        total = vals.sum(axis=0)
        loo = (total - vals) / (paths - 1)
        stats = loo[:, 0] - loo[:, 1] * loo[:, 2]
        se = float(math.sqrt((paths - 1) / paths * ((stats - stats.mean()) ** 2).sum()))
    else:
        se = 0.0
    return AFPEstimate(defect, se, scale * defect, scale * se, paths, False)


__all__ = [
    "AFPEstimate",
    "ChainState",
    "CumulantEstimate",
    "EigenReport",
    "Ensemble",
    "InitialCycleLimits",
    "MomentEstimate",
    "PausingSpec",
    "Prediction",
    "SimulationConfig",
    "TransitionMatrix",
    "a_coefficient",
    "afp_probe",
    "character_averages",
    "component_moments",
    "down_probabilities",
    "down_weights",
    "eigen_check",
    "estimate_cumulants",
    "estimate_rescaled_moments",
    "initial_cumulants",
    "moments_by_shape_sum",
    "plancherel_sample",
    "predicted_cumulants",
    "rescaled_moments",
    "resolve_workers",
    "reversibility_holds",
    "sample_path",
    "sample_path_times",
    "simulate_moments",
    "step_sample",
    "transition_matrix",
    "up_probabilities",
    "up_weights",
]

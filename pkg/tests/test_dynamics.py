import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from wreath_shapes.characters import MultiPartition, multipartitions, normalized_char, plancherel_mass
from wreath_shapes.diagrams import YoungDiagram
from wreath_shapes.dynamics import (
    ChainState,
    Ensemble,
    InitialCycleLimits,
    PausingSpec,
    SimulationConfig,
    a_coefficient,
    afp_probe,
    character_averages,
    component_moments,
    down_probabilities,
    eigen_check,
    estimate_cumulants,
    estimate_rescaled_moments,
    initial_cumulants,
    moments_by_shape_sum,
    plancherel_sample,
    predicted_cumulants,
    resolve_workers,
    reversibility_holds,
    sample_path,
    simulate_moments,
    step_sample,
    transition_matrix,
    up_probabilities,
)
from wreath_shapes.freeprob import moments, transition_measure
from wreath_shapes.wreath_group import BudgetExceeded, ConjType, reduced_types_upto

mp = MultiPartition.parse


def test_single_box_matrix():
    P = transition_matrix(1, 2)
    assert P.P == [[Fraction(1, 2)] * 2] * 2


@pytest.mark.parametrize("n,r", [(n, r) for n in range(1, 5) for r in (1, 2)])
def test_rows_are_stochastic_and_reversible(n, r):
    P = transition_matrix(n, r)
    assert all(sum(row) == 1 for row in P.P)
    assert reversibility_holds(P)
    # the Plancherel measure is stationary
    mass = [plancherel_mass(lam) for lam in P.states]
    assert [sum(mass[i] * P.P[i][j] for i in range(len(mass))) for j in range(len(mass))] == mass


@pytest.mark.parametrize("n,r", [(n, r) for n in range(1, 5) for r in (1, 2)])
def test_two_stage_kernel_composes_to_the_matrix(n, r):
    P = transition_matrix(n, r)
    for i, lam in enumerate(P.states):
        row = Counter()
        for nu, p in down_probabilities(lam).items():
            for mu, q in up_probabilities(nu).items():
                row[mu] += p * q
        assert [row.get(mu, 0) for mu in P.states] == P.P[i]


def test_stage_examples():
    assert down_probabilities(mp("(3)|()")) == {mp("(2)|()"): 1}
    assert down_probabilities(mp("(1)|(1)")) == {mp("()|(1)"): Fraction(1, 2), mp("(1)|()"): Fraction(1, 2)}
    assert up_probabilities(mp("()|()")) == {mp("(1)|()"): Fraction(1, 2), mp("()|(1)"): Fraction(1, 2)}


def test_matrix_budget():
    with pytest.raises(BudgetExceeded):
        transition_matrix(6, 3, max_states=100)


@pytest.mark.parametrize("n,r", [(n, r) for n in range(1, 5) for r in (1, 2)])
def test_characters_are_eigenvectors(n, r):
    P = transition_matrix(n, r)
    for rho in reduced_types_upto(n, r):
        rep = eigen_check(n, r, rho, P)
        assert rep.ok, str(rho)


def test_eigen_examples():
    rep = eigen_check(1, 2, ConjType.from_mapping(2, {1: [1]}))
    assert rep.eigenvalue == 0 and sorted(complex(v).real for v in rep.vector) == [-1, 1]
    assert eigen_check(3, 1, ConjType.from_mapping(1, {0: [2]})).eigenvalue == Fraction(1, 3)
    assert eigen_check(3, 2, ConjType.identity(2)).eigenvalue == 1


def test_step_from_a_row_stays_in_degree():
    rng = np.random.default_rng(1)
    state = ChainState(mp("(3)|()"))
    for _ in range(50):
        state = step_sample(state, rng)
        assert state.current.n == 3
    assert state.steps == 50


def test_plancherel_sampler_frequencies():
    rng = np.random.default_rng(7)
    assert plancherel_sample(0, 2, rng) == MultiPartition.empty(2)
    draws = 20_000
    counts = Counter(plancherel_sample(2, 2, rng) for _ in range(draws))
    for lam in multipartitions(2, 2):
        p = float(plancherel_mass(lam))
        se = math.sqrt(p * (1 - p) / draws)
        assert abs(counts[lam] / draws - p) < 4 * se


def test_sampled_transitions_match_matrix():
    P = transition_matrix(3, 2)
    rng = np.random.default_rng(11)
    lam = mp("(2)|(1)")
    draws = 20_000
    counts = Counter(step_sample(ChainState(lam), rng).current for _ in range(draws))
    i = P.index(lam)
    for j, mu in enumerate(P.states):
        p = float(P.P[i][j])
        se = math.sqrt(max(p * (1 - p), 1e-12) / draws)
        assert abs(counts[mu] / draws - p) < 4 * se + 1e-12


def test_plancherel_is_stationary_in_continuous_time():
    # chi-square goodness of fit at n=2 against the Plancherel masses
    pausing = PausingSpec("exponential", mean=1.0)
    states = list(multipartitions(2, 2))
    draws = 4000
    counts = Counter()
    for i in range(draws):
        rng = np.random.default_rng([3, i])
        start = plancherel_sample(2, 2, rng)
        counts[sample_path(start, 1.7, pausing, rng).current] += 1
    chi2 = sum((counts[s] - draws * float(plancherel_mass(s))) ** 2 / (draws * float(plancherel_mass(s))) for s in states)
    assert chi2 < 18.47  # 0.999 quantile with 4 degrees of freedom


def test_zero_time_keeps_the_start():
    rng = np.random.default_rng(0)
    lam = mp("(2,1)|(1)")
    assert sample_path(lam, 0.0, PausingSpec(), rng).current == lam


@pytest.mark.parametrize("pausing", [PausingSpec("exponential", 1.5), PausingSpec("gamma", 0.8, shape=3.0), PausingSpec("table", values=(0.5, 2.0), probs=(0.5, 0.5))])
def test_renewal_counts_have_the_right_mean(pausing):
    s = 200.0
    counts = np.array([pausing.counts([s], np.random.default_rng([5, i]))[0] for i in range(2000)])
    se = counts.std(ddof=1) / math.sqrt(len(counts))
    # elementary renewal theorem; the overshoot bias is O(1) against s/m = O(100)
    assert abs(counts.mean() - s / pausing.mean) < 3 * se + 1.0


def test_counts_are_monotone():
    c = PausingSpec("gamma", 1.0, shape=2.0).counts([0.0, 1.0, 5.0, 5.0, 30.0], np.random.default_rng(2))
    assert c[0] == 0 and c == sorted(c)


def test_pausing_validation():
    with pytest.raises(ValueError):
        PausingSpec("cauchy")
    with pytest.raises(ValueError):
        PausingSpec("exponential", mean=0.0)
    with pytest.raises(ValueError):
        PausingSpec("table", values=(1.0,), probs=(0.5,))
    assert PausingSpec("table", values=(1.0, 3.0), probs=(0.5, 0.5)).mean == 2.0
    assert PausingSpec("gamma").smooth_characteristic_function
    assert not PausingSpec("table", values=(1.0,), probs=(1.0,)).smooth_characteristic_function


def test_a_coefficient_closed_form():
    assert a_coefficient(3, 10, 0.0, PausingSpec("gamma")) == (1.0, 0.0)
    value, se = a_coefficient(2, 200, 200.0, PausingSpec("exponential", 1.0))
    assert value == math.exp(-2.0) and se == 0.0
    with pytest.raises(ValueError):
        a_coefficient(5, 5, 1.0, PausingSpec())


def test_a_coefficient_exponential_matches_monte_carlo():
    # the closed form is E[(1 - k/n)^N] for Poisson N; check the identity by sampling
    n, k, s = 50, 3, 40.0
    rng = np.random.default_rng(9)
    N = rng.poisson(s, 200_000)
    mc = np.mean((1 - k / n) ** N)
    assert a_coefficient(k, n, s, PausingSpec())[0] == pytest.approx(mc, abs=4 * np.std((1 - k / n) ** N) / math.sqrt(len(N)))


def test_component_moments_are_exact():
    lam = YoungDiagram((4, 2, 1))
    assert component_moments(lam, 6) == moments(transition_measure(lam), 6)


def small_config(**kw):
    base = dict(n=8, r=2, ensemble=Ensemble.rectangle(2, 4, 0, 2), times=(0.0, 0.5), orders=(1, 2, 3), paths=40, seed=3, workers=1)
    base.update(kw)
    return SimulationConfig(**base)


def test_first_moment_vanishes_on_every_path():
    data = np.asarray(simulate_moments(small_config()))
    assert np.all(data[:, :, :, 1] == 0)


def test_rescaled_second_moment_is_component_mass():
    data = np.asarray(simulate_moments(small_config()))
    assert np.allclose(data[:, :, :, 2].sum(axis=2), 1.0)


def test_simulation_is_deterministic_across_workers():
    a = simulate_moments(small_config(workers=1))
    b = simulate_moments(small_config(workers=2))
    assert a == b


def test_time_order_does_not_change_paths():
    a = simulate_moments(small_config(times=(0.0, 0.5)))
    b = simulate_moments(small_config(times=(0.5, 0.0)))
    assert [p[::-1] for p in b] == a


def test_threads_env_caps_workers(monkeypatch):
    monkeypatch.setenv("WREATH_SHAPES_THREADS", "1")
    assert resolve_workers(8) == 1
    monkeypatch.setenv("WREATH_SHAPES_THREADS", "lots")
    with pytest.raises(ValueError):
        resolve_workers(2)


def test_config_validation():
    with pytest.raises(ValueError):
        small_config(paths=0)
    with pytest.raises(ValueError):
        small_config(times=(-1.0,))
    with pytest.raises(ValueError):
        small_config(ensemble=Ensemble.rectangle(2, 3, 0, 2))


def test_ensemble_parsing():
    assert Ensemble.parse("plancherel", 2).kind == "plancherel"
    assert Ensemble.parse("rectangle:2x3@1", 2).states == (mp("()|(3,3)"),)
    mix = Ensemble.parse("1*(2)|();3*()|(1,1)", 2)
    assert mix.weights == (0.25, 0.75)
    with pytest.raises(ValueError):
        Ensemble.parse("1*(2)|();1*()|(1)", 2)


def test_plancherel_predictions_are_stationary():
    for r in (1, 2, 3):
        pred = predicted_cumulants(InitialCycleLimits.plancherel(r), 0.8, 1.0, r, K=6)
        for z in range(r):
            assert pred.cumulants[z] == pytest.approx([0.0, 1 / r, 0, 0, 0, 0])


def test_prediction_at_time_zero_is_the_start():
    R0 = initial_cumulants(Ensemble.rectangle(10, 40, 0, 2), 400, 2, 6)
    pred = predicted_cumulants(R0, 0.0, 1.0, 2)
    assert pred.cumulants[0] == pytest.approx(R0[0])
    assert R0[0][1] == pytest.approx(1.0) and R0[0][2] == pytest.approx(1.5)


def test_third_cumulant_decay():
    limits = InitialCycleLimits(2, {(0, 2): 1.0, (0, 3): 0.6})
    p0 = predicted_cumulants(limits, 0.0, 1.0, 2, K=4)
    p1 = predicted_cumulants(limits, 0.7, 1.0, 2, K=4)
    assert p1.cumulants[0][2] / p0.cumulants[0][2] == pytest.approx(math.exp(-1.4))


def test_cycle_limits_validation():
    with pytest.raises(ValueError):
        InitialCycleLimits(2, {(0, 2): 0.5})
    with pytest.raises(ValueError):
        InitialCycleLimits(3, {(0, 2): 1.0, (1, 3): 1j}).cumulants(0, 3)


@pytest.mark.parametrize("R", [[0.0, 0.5, 0.0, 0.0, 0.0, 0.0], [0.0, 0.9, 0.4, -0.3, 0.2, 0.1, 0.05, 0.0]])
def test_moment_prediction_matches_shape_sum(R):
    pred = predicted_cumulants({0: R}, 0.0, 1.0, 1)
    assert pred.moments[0] == pytest.approx(moments_by_shape_sum(R, len(R)))


def test_cumulant_estimates_on_a_fixed_state():
    cfg = small_config(times=(0.0,), orders=(1, 2, 3, 4), paths=5)
    data = np.asarray(simulate_moments(cfg))
    est = estimate_cumulants(data, cfg.times, 4)
    exact = initial_cumulants(cfg.ensemble, cfg.n, cfg.r, 4)
    for e in est:
        assert e.value == pytest.approx(exact[e.zeta][e.k - 1], abs=1e-12)
        assert e.stderr == pytest.approx(0.0, abs=1e-12)


def test_character_decay():
    # f_{tn}(rho) = a(k, n, tn) f_0(rho) with k the support size of rho
    cfg = small_config(n=8, times=(0.5,), paths=3000, seed=21)
    start = cfg.ensemble.states[0]
    rho = ConjType.from_mapping(2, {0: [2]})
    vals = character_averages(cfg, [rho])[:, 0].real
    predicted = a_coefficient(2, 8, 4.0, cfg.pausing)[0] * complex(normalized_char(start, rho)).real
    assert abs(vals.mean() - predicted) < 3 * vals.std(ddof=1) / math.sqrt(len(vals))


def test_afp_is_exact_for_plancherel():
    cfg = small_config(ensemble=Ensemble.plancherel(), times=(0.5,))
    g = ConjType.from_mapping(2, {0: [2]})
    est = afp_probe(cfg, g, g)
    assert est.exact and est.defect == 0.0
    e = ConjType.identity(2)
    assert afp_probe(small_config(times=(0.5,), paths=10), e, e).defect == pytest.approx(0.0, abs=1e-12)


def test_afp_rejects_oversized_pairs():
    g = ConjType.from_mapping(2, {0: [5]})
    with pytest.raises(ValueError):
        afp_probe(small_config(times=(0.5,)), g, g)


def test_moment_estimates_report_per_path_values():
    est = estimate_rescaled_moments(small_config(paths=10))
    assert len(est) == 2 * 2 * 3
    for e in est:
        assert e.samples == 10 and len(e.per_path) == 10
        assert e.stderr == pytest.approx(np.std(e.per_path, ddof=1) / math.sqrt(10))

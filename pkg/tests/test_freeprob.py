import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from wreath_shapes.diagrams import YoungDiagram, partitions, profile, rectangle
from wreath_shapes.freeprob import (
    AtomicMeasure,
    all_diagrams_upto,
    cumulants_to_moments,
    evolve_by_free_convolution,
    evolve_cumulants,
    gauss_quadrature,
    is_noncrossing,
    markov_inverse,
    measure_of_profile,
    moments,
    moments_by_nc_sum,
    moments_to_cumulants,
    nc_count,
    nc_enumerate,
    nc_partitions,
    profile_identity_holds,
    transition_measure,
)

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=12)


def catalan(k):
    return math.comb(2 * k, k) // (k + 1)


def narayana(k, l):
    return math.comb(k, l) * math.comb(k, l - 1) // k


def test_crossing_detection():
    assert is_noncrossing([[1, 3], [2]])
    assert not is_noncrossing([[1, 3], [2, 4]])
    assert is_noncrossing([[1, 4], [2, 3]])


@pytest.mark.parametrize("k", range(1, 9))
def test_nc_partitions_are_catalan(k):
    assert len(nc_partitions(k)) == catalan(k)


@pytest.mark.parametrize("k", range(1, 9))
def test_nc_count_matches_enumeration(k):
    by_length = {}
    for sigma in partitions(k):
        count = nc_count(sigma)
        assert count == len(nc_enumerate(sigma))
        by_length[sigma.length] = by_length.get(sigma.length, 0) + count
    assert by_length == {l: narayana(k, l) for l in range(1, k + 1)}


def test_nc_count_examples():
    assert nc_count(YoungDiagram((2, 2))) == 2
    assert nc_count(YoungDiagram((2, 1, 1))) == 6
    assert nc_count(YoungDiagram((4,))) == 1


@pytest.mark.parametrize("K", range(1, 9))
def test_cumulant_recursion_matches_nc_sum(K):
    R = [Fraction(j * j - 3, j + 1) for j in range(1, K + 1)]
    assert cumulants_to_moments(R) == moments_by_nc_sum(R)


def test_semicircle_moments_are_catalan():
    M = cumulants_to_moments([0, 1, 0, 0, 0, 0, 0, 0])
    assert M[2::2] == [catalan(j) for j in range(1, 5)]
    assert all(x == 0 for x in M[1::2])


@settings(max_examples=100, deadline=None)
@given(st.lists(fractions, min_size=10, max_size=10))
def test_cumulant_round_trip(R):
    M = cumulants_to_moments(R)
    assert M[0] == 1
    assert moments_to_cumulants(M) == R
    assert cumulants_to_moments(moments_to_cumulants(M)) == M


def test_transition_measure_of_single_box():
    m = transition_measure(YoungDiagram((1,)))
    assert m.atoms == (-1, 1) and m.weights == (Fraction(1, 2), Fraction(1, 2))


@pytest.mark.parametrize("lam", list(all_diagrams_upto(8)), ids=str)
def test_markov_round_trip(lam):
    p = profile(lam)
    m = transition_measure(lam)
    assert sum(m.weights) == 1 and all(w > 0 for w in m.weights)
    M = moments(m, 2)
    assert M[1] == 0 and M[2] == lam.size
    back = markov_inverse(m)
    assert back.valleys == p.valleys and back.peaks == p.peaks
    assert profile_identity_holds(p, m)
    assert measure_of_profile(p) == m


def test_markov_inverse_recovers_float_profile():
    m = transition_measure(YoungDiagram((5, 3, 3, 1))).to_floats()
    back = markov_inverse(m)
    p = profile(YoungDiagram((5, 3, 3, 1)))
    assert [float(v) for v in back.valleys] == pytest.approx([float(v) for v in p.valleys])
    assert [float(v) for v in back.peaks] == pytest.approx([float(v) for v in p.peaks])


def test_rectangle_measure():
    # centred a x b rectangle: atoms at -a and b
    m = transition_measure(rectangle(10, 40))
    assert m.atoms == (-10, 40)
    assert m.weights == (Fraction(4, 5), Fraction(1, 5))


@pytest.mark.parametrize("t", [0.0, 0.3, 1.0, 2.5])
def test_evolution_equals_free_convolution(t):
    R0 = [0.0, 0.8, 0.3, -0.2, 0.1]
    assert evolve_cumulants(R0, t, 1.3, 2) == pytest.approx(evolve_by_free_convolution(R0, t, 1.3, 2))


def test_evolution_fixes_plancherel_limit():
    R0 = [0.0, 1 / 3, 0.0, 0.0]
    assert evolve_cumulants(R0, 0.7, 1.0, 3) == pytest.approx(R0)


def test_evolution_rejects_bad_parameters():
    with pytest.raises(ValueError):
        evolve_cumulants([0, 1], -1, 1, 2)
    with pytest.raises(ValueError):
        evolve_cumulants([0, 1], 1, 0, 2)


def test_gauss_quadrature_semicircle():
    q = gauss_quadrature([float(x) for x in cumulants_to_moments([0, 1, 0, 0, 0, 0])], 3)
    assert [float(a) for a in q.atoms] == pytest.approx([-math.sqrt(2), 0, math.sqrt(2)], abs=1e-12)
    assert [float(w) for w in q.weights] == pytest.approx([0.25, 0.5, 0.25])


def test_gauss_quadrature_recovers_atomic_measure():
    m = transition_measure(YoungDiagram((4, 2, 1)))
    M = [float(x) for x in moments(m, 2 * len(m.atoms) - 1)]
    q = gauss_quadrature(M, len(m.atoms))
    assert [float(a) for a in q.atoms] == pytest.approx([float(a) for a in m.atoms], abs=1e-9)
    longer = [float(x) for x in moments(m, 2 * len(m.atoms) + 1)]
    with pytest.raises(ValueError):
        gauss_quadrature(longer, len(m.atoms) + 1)


def test_atomic_measure_validation():
    with pytest.raises(ValueError):
        AtomicMeasure((0, 1), (Fraction(1, 2),))


def test_worked_examples():
    m = transition_measure(YoungDiagram((2, 1)))
    assert m.atoms == (-2, 0, 2)
    assert m.weights == (Fraction(3, 8), Fraction(1, 4), Fraction(3, 8))
    assert moments(m, 4) == [1, 0, 3, 0, 12]
    assert markov_inverse(m).peaks == (-1, 1)
    assert moments(transition_measure(YoungDiagram(())), 3) == [1, 0, 0, 0]
    assert nc_count(YoungDiagram((3, 2))) == 5
    assert moments_to_cumulants([1, 0, 1, 0, 2]) == [0, 1, 0, 0]
    assert moments_to_cumulants([1, 0, 1, 0, 1]) == [0, 1, 0, -1]
    assert evolve_cumulants([0, 1, 1], math.log(2), 1.0, 2)[2] == pytest.approx(0.25)


def test_single_atom_has_no_peaks():
    p = markov_inverse(AtomicMeasure((Fraction(0),), (Fraction(1),)))
    assert p.valleys == (0,) and p.peaks == ()


@given(st.integers(0, 8).flatmap(lambda n: st.sampled_from(list(partitions(n)))), st.sampled_from([Fraction(1, 2), Fraction(3), Fraction(2, 7)]))
def test_moment_homogeneity(lam, c):
    m = transition_measure(lam)
    assert moments(m.scaled(c), 5) == [c**k * x for k, x in enumerate(moments(m, 5))]

import math
from itertools import product

import numpy as np
import pytest

from wreath_shapes.wreath_group import (
    AlgebraElement,
    BudgetExceeded,
    ConjType,
    WreathElement,
    all_elements,
    class_indicator,
    class_representative,
    class_size,
    commutes,
    conj_type_of,
    conj_types,
    conjugacy_class,
    generators,
    group_inverse,
    group_multiply,
    identity_element,
    is_central,
    jm_element,
    jm_moment_bruteforce,
    last_slot_color,
    make_element,
    multiply,
    restrict_E,
    transposition,
)


def el(colors, perm):
    return WreathElement(tuple(colors), tuple(perm))


def as_matrix(g, r):
    """Monomial matrix of g on C[Z_r]^m: slot j with colour c goes to slot w(j)."""
    m = len(g.perm)
    zeta = np.exp(2j * np.pi / r)
    M = np.zeros((m, m), dtype=complex)
    for j in range(m):
        M[g.perm[j], j] = zeta ** g.colors[g.perm[j]]
    return M


def test_product_table_of_s2_z2():
    # hand table for the law (d, w)(d', w') = (d + w.d', ww')
    s = el((0, 0), (1, 0))
    a = el((1, 0), (0, 1))
    assert group_multiply(s, a, 2) == el((0, 1), (1, 0))
    assert group_multiply(a, s, 2) == el((1, 0), (1, 0))
    assert group_multiply(s, s, 2) == identity_element(2)
    # conjugating a colour by a transposition moves it to the swapped slot
    assert group_multiply(group_multiply(s, a, 2), group_inverse(s, 2), 2) == el((0, 1), (0, 1))
    g = el((1,), (0,))
    assert group_multiply(g, g, 2) == identity_element(1)


@pytest.mark.parametrize("m,r", [(2, 2), (2, 3), (3, 2)])
def test_law_is_a_faithful_matrix_representation(m, r):
    elems = list(all_elements(m, r))
    assert len(elems) == math.factorial(m) * r**m
    for g, h in product(elems[:: max(1, len(elems) // 12)], elems):
        assert np.allclose(as_matrix(group_multiply(g, h, r), r), as_matrix(g, r) @ as_matrix(h, r))


@pytest.mark.parametrize("m,r", [(2, 2), (3, 2), (2, 3)])
def test_associativity_and_inverses(m, r):
    elems = list(all_elements(m, r))
    for g in elems:
        assert group_multiply(g, group_inverse(g, r), r) == identity_element(m)
    sample = elems[:: max(1, len(elems) // 8)]
    for a, b, c in product(sample, repeat=3):
        assert group_multiply(group_multiply(a, b, r), c, r) == group_multiply(a, group_multiply(b, c, r), r)


def test_conjugacy_type_examples():
    assert conj_type_of(identity_element(3), 2) == ConjType.identity(2)
    assert conj_type_of(el((1, 0), (1, 0)), 2) == ConjType.from_mapping(2, {1: [2]})
    assert conj_type_of(el((1, 1), (0, 1)), 2) == ConjType.from_mapping(2, {1: [1, 1]})
    assert str(ConjType.identity(2)) == "e"


@pytest.mark.parametrize("n,r", [(n, r) for n in range(1, 5) for r in range(1, 4)])
def test_class_sizes_match_orbits(n, r):
    total = 0
    for rho in conj_types(n, r):
        size = class_size(rho, n)
        orbit = conjugacy_class(rho, n)
        assert len(orbit) == size
        assert all(conj_type_of(g, r) == rho.reduced() for g in orbit)
        assert class_representative(rho, n) in orbit
        total += size
    assert total == r**n * math.factorial(n)


def test_class_size_examples():
    assert class_size(ConjType.from_mapping(2, {0: [2]}), 2) == 2
    assert class_size(ConjType.from_mapping(2, {1: [1]}), 1) == 1
    assert class_size(ConjType.from_mapping(1, {0: [2]}), 3) == 3
    with pytest.raises(ValueError):
        class_size(ConjType.from_mapping(2, {0: [3]}), 2)


def test_class_indicator_examples():
    assert class_indicator(ConjType.identity(2), 2) == AlgebraElement.identity(2, 2)
    a = class_indicator(ConjType.from_mapping(2, {1: [1]}), 2)
    assert dict(a.items()) == {el((1, 0), (0, 1)): 1, el((0, 1), (0, 1)): 1}
    assert len(class_indicator(ConjType.from_mapping(2, {0: [2]}), 2)) == 2
    assert is_central(class_indicator(ConjType.from_mapping(3, {1: [2]}), 3))


def test_jm_element_examples():
    assert jm_element(0, 0, 2).is_zero()
    assert dict(jm_element(1, 0, 2).items()) == {el((0, 0), (1, 0)): 1, el((1, 1), (1, 0)): 1}
    assert dict(jm_element(1, 1, 2).items()) == {el((0, 1), (1, 0)): 1, el((1, 0), (1, 0)): 1}
    J = jm_element(1, 0, 2)
    assert dict(multiply(J, J).items()) == {identity_element(2): 2, el((1, 1), (0, 1)): 2}
    assert restrict_E(multiply(J, J)) == AlgebraElement.identity(2, 1).scale(2)
    assert restrict_E(AlgebraElement.identity(2, 2)) == AlgebraElement.identity(2, 1)


@pytest.mark.parametrize("n,r", [(n, r) for n in range(1, 5) for r in range(1, 4)])
def test_jm_elements_commute_with_the_subgroup(n, r):
    for theta in range(r):
        J = jm_element(n, theta, r)
        for g in generators(n, r):
            assert commutes(J, WreathElement(g.colors + (0,), g.perm + (n,)))
        # twisted element factors through the last-slot colour on either side
        c = last_slot_color(n, theta, r)
        J0 = jm_element(n, 0, r)
        assert J == multiply(J0, c) == multiply(c, J0)


def test_restriction_keeps_lower_degree_support():
    a = AlgebraElement(2, 3, {el((1, 0, 0), (1, 0, 2)): 3, el((0, 0, 1), (0, 1, 2)): 5})
    assert dict(restrict_E(a).items()) == {el((1, 0), (1, 0)): 3}
    assert restrict_E(AlgebraElement.basis(el((0, 0), (1, 0)), 2)).is_zero()


def test_bruteforce_examples():
    for n in range(0, 4):
        for y in range(2):
            assert jm_moment_bruteforce(1, y, n, 2).is_zero()
    assert jm_moment_bruteforce(2, 0, 1, 2) == AlgebraElement.identity(2, 1).scale(2)
    assert dict(jm_moment_bruteforce(2, 1, 1, 2).items()) == {el((1,), (0,)): 2}


@pytest.mark.parametrize("n", range(1, 6))
def test_symmetric_group_second_moment(n):
    assert jm_moment_bruteforce(2, 0, n, 1) == AlgebraElement.identity(1, n).scale(n)


@pytest.mark.parametrize("n,r", [(n, r) for n in range(1, 5) for r in range(1, 4)])
def test_bruteforce_moments_are_central(n, r):
    for k in range(1, 5):
        for y in range(r):
            a = jm_moment_bruteforce(k, y, n, r)
            assert all(commutes(a, g) for g in generators(n, r))


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        jm_moment_bruteforce(4, 0, 12, 3, budget=1000)


def test_degree_mismatch_is_rejected():
    with pytest.raises(ValueError):
        multiply(AlgebraElement.identity(2, 2), AlgebraElement.identity(2, 3))


def test_make_element_validates():
    assert make_element([3, -1], [1, 0], 2) == el((1, 1), (1, 0))
    with pytest.raises(ValueError):
        make_element([0, 0], [0, 0], 2)
    assert transposition(3, 1, 3) == (2, 1, 0)

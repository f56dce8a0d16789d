import itertools

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from cuntzendo.core.algebra import AlgebraElement, adjoint, equals_within, mul, phi
from cuntzendo.core.data_loader import load_element
from cuntzendo.core.endomorphism import (InducedPermutation, PermutationMap, commutes_with_bogolyubov, compose_endos,
                                         core_product, detect_induced, endo_images, gauge_commutation_test,
                                         induced_span_dimension, lambda_apply, permutation_matrix,
                                         permutation_unitary, unitary_of_endo, weyl_commutation_test)
from cuntzendo.core.errors import DomainError, ResourceError
from cuntzendo.core.izumi import FiniteAbelianGroup, izumi_unitary
from cuntzendo.core.masa import conjugate_by_bogolyubov
from cuntzendo.core.matrix import to_matrix
from cuntzendo.core.settings import Settings, using
from cuntzendo.utils.sampling import phased_su2, random_unitary, real_su2, rng_for

from conftest import element_path

ALL_MAPS_22 = list(PermutationMap.all_maps(2, 2))

WORDS = st.lists(st.integers(min_value=1, max_value=2), max_size=2).map(tuple)
WORD_ELEMENTS = st.tuples(WORDS, WORDS, st.sampled_from([1.0, -2.0, 0.5j])).map(
    lambda t: AlgebraElement.word(2, t[0], t[1], t[2]))
SUMS = st.lists(WORD_ELEMENTS, min_size=1, max_size=4).map(lambda xs: sum(xs[1:], xs[0]))


def three_letter_swap(n=2):
    """sum_{i,j,l} S_l S_j S_i S_j^* S_i^* S_l^*."""
    return AlgebraElement(n, {((l, j, i), (l, i, j)): 1.0 for l, j, i in itertools.product(range(1, n + 1), repeat=3)})


def test_permutation_map_validation():
    with pytest.raises(DomainError, match="not a bijection"):
        PermutationMap(2, 1, (((1,), (1,)), ((2,), (1,))))
    p = PermutationMap.identity(2, 2)
    assert p((1, 2)) == (1, 2)
    assert len(ALL_MAPS_22) == 24
    assert len(set(ALL_MAPS_22)) == 24


def test_permutation_unitary_round_trip(swap_u):
    p = PermutationMap.from_unitary(swap_u)
    assert p.mapping == {(1, 1): (1, 2), (1, 2): (1, 1), (2, 1): (2, 1), (2, 2): (2, 2)}
    assert permutation_unitary(p).equals(swap_u)
    np.testing.assert_allclose(permutation_matrix(p), to_matrix(swap_u, 2).entries)
    assert PermutationMap.from_unitary(real_su2(0.6)) is None
    phases = AlgebraElement(2, {((1,), (1,)): 1j, ((2,), (2,)): 1.0})
    assert PermutationMap.from_unitary(phases) is None


def test_detect_induced(shift_u, swap_u):
    assert detect_induced(PermutationMap.from_unitary(shift_u)) == InducedPermutation(2, (2, 1))
    assert detect_induced(PermutationMap.from_unitary(swap_u)) is None
    assert detect_induced(PermutationMap.identity(2, 3)).omega == (1, 2, 3)
    assert detect_induced(PermutationMap.from_unitary(three_letter_swap())).omega == (1, 3, 2)


def test_detect_induced_guard():
    with using(Settings(induced_guard=1)):
        with pytest.raises(ResourceError, match="guard"):
            detect_induced(PermutationMap.identity(2, 2))


def test_induced_permutation_map():
    omega = InducedPermutation(3, (3, 1, 2))
    assert omega.apply((1, 2, 2)) == (2, 1, 2)
    assert omega.to_map(2)((1, 1, 2)) == (2, 1, 1)


def test_conjugated_swap_is_not_induced(swap_u, hadamard_z):
    p = PermutationMap.from_unitary(conjugate_by_bogolyubov(swap_u, hadamard_z))
    assert p is not None
    assert detect_induced(p) is None


def test_gauge_commutation(swap_u, thompson_u):
    assert gauge_commutation_test(swap_u)
    assert not gauge_commutation_test(thompson_u)
    assert gauge_commutation_test(izumi_unitary(FiniteAbelianGroup((2,))))


def test_weyl_examples(flip_times_x):
    result = weyl_commutation_test(three_letter_swap(), 3)
    assert result.commutes
    assert result.random_agrees
    assert result.span_dim == 5
    assert result.seed == 0

    result = weyl_commutation_test(flip_times_x, 2)
    assert not result.commutes
    assert result.residual > 0.1
    assert result.random_agrees


def test_weyl_requires_unitary():
    with pytest.raises(DomainError, match="unitary"):
        weyl_commutation_test(AlgebraElement.projection(2, (1,)), 1)


def test_induced_span_dimension():
    assert induced_span_dimension(2, 2) == 2
    assert induced_span_dimension(2, 3) == 5
    assert induced_span_dimension(3, 3) == 6


@pytest.mark.parametrize("p", ALL_MAPS_22)
def test_weyl_matches_induced_detection(p):
    u = permutation_unitary(p)
    result = weyl_commutation_test(u, 2)
    assert result.commutes == (detect_induced(p) is not None)
    assert result.random_agrees


def test_weyl_matches_induced_detection_sampled_k3():
    rng = rng_for(5)
    domain = list(PermutationMap.identity(2, 3).mapping)
    for _ in range(6):
        image = [domain[i] for i in rng.permutation(len(domain))]
        p = PermutationMap(2, 3, tuple(zip(domain, image)))
        assert weyl_commutation_test(permutation_unitary(p), 3).commutes == (detect_induced(p) is not None)


def test_bogolyubov_commutation(shift_u, swap_u, hadamard_z):
    assert commutes_with_bogolyubov(shift_u, hadamard_z)
    assert not commutes_with_bogolyubov(swap_u, hadamard_z)


def test_lambda_of_generators(swap_u, thompson_u):
    for u in (swap_u, thompson_u):
        for i, image in enumerate(endo_images(u), start=1):
            assert lambda_apply(u, AlgebraElement.generator(2, i)).equals(image)
        assert lambda_apply(u, AlgebraElement.identity(2)).equals(AlgebraElement.identity(2))


@pytest.mark.parametrize("name", ["swap_u", "thompson_u", "rotation_w", "shift_u"])
def test_unitary_of_endo_round_trip(name, request):
    u = request.getfixturevalue(name)
    assert unitary_of_endo(endo_images(u)).equals(u)


def test_unitary_of_endo_rejects_non_isometries():
    s1 = AlgebraElement.generator(2, 1)
    with pytest.raises(DomainError, match="fails with residual"):
        unitary_of_endo([s1, s1])
    with pytest.raises(DomainError, match="sum_i"):
        unitary_of_endo([AlgebraElement.word(2, (1, 1)), AlgebraElement.word(2, (2, 1))])


@hsettings(max_examples=40, deadline=None)
@given(x=WORD_ELEMENTS, y=WORD_ELEMENTS)
def test_lambda_is_a_star_homomorphism(x, y):
    u = real_su2(0.6) * AlgebraElement(2, {((1, 1), (1, 2)): 1, ((1, 2), (1, 1)): 1, ((2,), (2,)): 1})
    for v in (u, AlgebraElement(2, {((1, 1), (1,)): 1, ((1, 2), (2, 1)): 1, ((2,), (2, 2)): 1})):
        assert equals_within(lambda_apply(v, mul(x, y)), mul(lambda_apply(v, x), lambda_apply(v, y)), 1e-10)
        assert equals_within(lambda_apply(v, adjoint(x)), adjoint(lambda_apply(v, x)), 1e-10)


def test_composition_law_on_permutations():
    rng = rng_for(7)
    for _ in range(50):
        u = permutation_unitary(ALL_MAPS_22[int(rng.integers(24))])
        w = permutation_unitary(ALL_MAPS_22[int(rng.integers(24))])
        composed = compose_endos(u, w)
        for i in (1, 2):
            s = AlgebraElement.generator(2, i)
            assert equals_within(lambda_apply(composed, s), lambda_apply(u, lambda_apply(w, s)), 1e-12)


def test_composition_law_on_dense_unitaries(rotation_w):
    u = random_unitary(2, 2, rng_for(2))
    composed = compose_endos(u, rotation_w)
    x = AlgebraElement.word(2, (1, 2), (2,))
    assert equals_within(lambda_apply(composed, x), lambda_apply(u, lambda_apply(rotation_w, x)), 1e-10)


def test_bogolyubov_inverse():
    z = phased_su2(1.2, 0.6, 0.8j)
    assert compose_endos(z, adjoint(z)).equals(AlgebraElement.identity(2))
    x = AlgebraElement.word(2, (2, 1), (1,))
    assert lambda_apply(adjoint(z), lambda_apply(z, x)).equals(x)


def test_core_product(swap_u, rotation_w, thompson_u):
    assert core_product(swap_u, rotation_w).equals(mul(swap_u, rotation_w))
    assert core_product(thompson_u, swap_u).equals(mul(thompson_u, swap_u))


@hsettings(max_examples=20, deadline=None)
@given(x=SUMS)
def test_shift_endomorphism_is_phi(x):
    shift = load_element(element_path('shift'))
    assert equals_within(lambda_apply(shift, x), phi(x), 1e-10)

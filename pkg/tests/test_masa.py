import numpy as np
import pytest

from cuntzendo.core.algebra import AlgebraElement, adjoint, phi, raise_to_profile
from cuntzendo.core.endomorphism import PermutationMap, lambda_apply, permutation_unitary
from cuntzendo.core.errors import DomainError, UsageError
from cuntzendo.core.izumi import FiniteAbelianGroup, izumi_unitary
from cuntzendo.core.masa import (DIRECT_ORACLE, ITERATIVE, ad_normalizer_necessary, conjugate_by_bogolyubov,
                                 decide_diagonal_invariance, e_slices, is_diagonal, masa_equal, oracle_direct_check,
                                 oracle_report, product_form_span, restrict_to_diagonal, standard_masa_invariance,
                                 standard_masa_span, sufficient_cor42, sufficient_cor43, sufficient_prop45)
from cuntzendo.core.matrix import is_monomial, to_matrix
from cuntzendo.utils.sampling import (phased_su2, phased_su2_family, random_monomial_unitary, random_unitary,
                                      real_su2, rng_for)

from conftest import ROOT_HALF, rotation_w_of, word_sum

Z2 = FiniteAbelianGroup((2,))


def check_report(report):
    assert report.subspace_dims == sorted(report.subspace_dims)
    assert report.R <= report.n ** (2 * (report.k - 1)) + 1
    assert (report.witness is None) == report.preserves_diagonal
    if report.preserves_diagonal:
        assert report.subspace_dims[-1] == report.subspace_dims[-2]


def check_chain(w, k=None):
    """The sufficient tests imply each other and the decision; the oracle agrees."""
    report = decide_diagonal_invariance(w, k)
    check_report(report)
    if sufficient_cor42(w, k):
        assert sufficient_prop45(w, k)
    if sufficient_prop45(w, k):
        assert report.preserves_diagonal
    assert oracle_direct_check(w, k, report.R + 2) == report.preserves_diagonal
    return report


def test_is_diagonal():
    assert is_diagonal(AlgebraElement(2, {((1, 1), (1, 1)): 1.0, ((2, 1), (2, 1)): 0.5}))
    assert is_diagonal(AlgebraElement.identity(2) - AlgebraElement.projection(2, (1, 2)))
    assert not is_diagonal(AlgebraElement.word(2, (1,), (2,)))
    assert not is_diagonal(AlgebraElement.generator(2, 1))
    assert is_diagonal(AlgebraElement.zero(2))
    flat = lambda_apply(izumi_unitary(Z2), AlgebraElement.projection(2, (1,)))
    assert not is_diagonal(flat)
    # S_1 S_2^* minus its own expansion at level two
    cancelled = AlgebraElement(2, {((1,), (2,)): 1.0, ((1, 1), (2, 1)): -1.0, ((1, 2), (2, 2)): -1.0})
    assert is_diagonal(cancelled)


def test_e_slices():
    x = to_matrix(AlgebraElement.word(2, (1,), (2,)), 1).entries
    a = AlgebraElement.word(2, (1,), (2,)) * phi(AlgebraElement.word(2, (2,), (1,)))
    slices = e_slices(a, 2)
    for i in (1, 2):
        for j in (1, 2):
            expected = x if (i, j) == (2, 1) else np.zeros((2, 2))
            np.testing.assert_allclose(to_matrix(slices[i - 1][j - 1], 1).entries, expected)
    one = e_slices(AlgebraElement.identity(2), 2)
    assert one[0][0].equals(AlgebraElement.identity(2))
    assert one[0][1].is_zero()
    with pytest.raises(UsageError):
        e_slices(a, 0)


def test_e_slices_reconstruct():
    rng = rng_for(1)
    for _ in range(20):
        a = random_unitary(2, 3, rng)
        slices = e_slices(a, 3)
        total = AlgebraElement.zero(2)
        for i in (1, 2):
            for j in (1, 2):
                total = total + slices[i - 1][j - 1] * phi(AlgebraElement.word(2, (i,), (j,)), 2)
        assert total.equals(a)


def test_identity_decision():
    report = decide_diagonal_invariance(AlgebraElement.identity(2))
    assert report.preserves_diagonal
    assert report.R == 1
    assert report.subspace_dims == [1, 1]
    assert report.method == ITERATIVE
    assert report.k == 1


def test_rotation_w_decision(rotation_w):
    report = check_chain(rotation_w)
    assert report.preserves_diagonal
    assert report.R <= 5
    assert sufficient_cor42(rotation_w)
    assert sufficient_prop45(rotation_w)


@pytest.mark.parametrize("a, b, c, d", [
    (1.0, 0.0, 0.0, 1.0),
    (0.6, 0.8j, ROOT_HALF, -ROOT_HALF),
    (np.exp(0.3j), 0.0, 0.28, 0.96),
])
def test_rotation_w_family(a, b, c, d):
    w = rotation_w_of(a, b, c, d)
    assert check_chain(w).preserves_diagonal
    assert sufficient_cor42(w)


def unit_pair(rng):
    s = rng.uniform(0, np.pi / 2)
    phases = np.exp(2j * np.pi * rng.random(2))
    return np.cos(s) * phases[0], np.sin(s) * phases[1]


def test_rotation_w_random_family():
    rng = rng_for(44)
    for _ in range(20):
        (a, b), (c, d) = unit_pair(rng), unit_pair(rng)
        w = rotation_w_of(a, b, c, d)
        assert sufficient_cor42(w)
        assert check_chain(w).preserves_diagonal
        if min(abs(a * b), abs(c * d)) > 0.1:
            assert not is_monomial(w, 2)


def test_izumi_decision():
    v = izumi_unitary(Z2)
    report = check_chain(v, 2)
    assert not report.preserves_diagonal
    assert report.R == 1
    assert report.subspace_dims == [1]
    assert not is_diagonal(report.witness)
    assert not sufficient_cor42(v)
    assert not sufficient_prop45(v)
    assert not oracle_direct_check(v, 2, 1)


def test_shift_decision(shift_u):
    report = check_chain(shift_u)
    assert report.preserves_diagonal
    assert report.subspace_dims == [1, 1]


def test_decision_rejects_bad_input(swap_u):
    with pytest.raises(DomainError, match="not unitary"):
        decide_diagonal_invariance(AlgebraElement.projection(2, (1,)))
    with pytest.raises(UsageError, match="k >= 1"):
        decide_diagonal_invariance(swap_u, 0)


@pytest.mark.parametrize("p", list(PermutationMap.all_maps(2, 2)))
def test_permutations_preserve_diagonal(p):
    assert check_chain(permutation_unitary(p), 2).preserves_diagonal


def test_random_monomials_preserve_diagonal():
    rng = rng_for(0)
    for _ in range(50):
        assert check_chain(random_monomial_unitary(2, 2, rng), 2).preserves_diagonal


def test_random_unitaries_agree_with_oracle():
    rng = rng_for(1)
    for _ in range(20):
        assert not check_chain(random_unitary(2, 2, rng), 2).preserves_diagonal


def test_decision_fails_at_second_step():
    # w = phi(z) d: the first step lands in D_2^1, pushing that back through phi(z) leaves the diagonal
    w = phi(real_su2(0.6)) * AlgebraElement(2, {((1, 1), (1, 1)): 1, ((1, 2), (1, 2)): 1j, ((2,), (2,)): 1})
    report = check_chain(w, 2)
    assert not report.preserves_diagonal
    assert report.R == 2
    assert report.subspace_dims == [1, 2]


def test_oracle(swap_u):
    assert oracle_direct_check(AlgebraElement.identity(2), 1, 3)
    assert oracle_direct_check(swap_u, 2, 3)
    report = oracle_report(izumi_unitary(Z2), 2, 1)
    assert report.method == DIRECT_ORACLE
    assert not report.preserves_diagonal
    assert report.witness is not None


def test_bogolyubov_conjugation(swap_u, hadamard_z):
    expected = word_sum(2, [((1, 1), (1, 1)), ((1, 2), (2, 2)), ((2, 2), (1, 2)), ((2, 1), (2, 1))])
    conjugated = conjugate_by_bogolyubov(swap_u, hadamard_z)
    assert conjugated.equals(expected)
    back = conjugate_by_bogolyubov(conjugated, adjoint(hadamard_z))
    assert back.equals(swap_u, 1e-12)
    assert conjugate_by_bogolyubov(swap_u, AlgebraElement.identity(2)).equals(swap_u)
    with pytest.raises(DomainError, match="F_n\\^1"):
        conjugate_by_bogolyubov(swap_u, swap_u)


@pytest.mark.parametrize("a, preserved", [
    (0.0, True),
    (1.0, True),
    (ROOT_HALF, True),
    (0.25, False),
    (0.5, False),
    (0.9, False),
])
def test_real_su2_standard_masas(swap_u, a, preserved):
    assert standard_masa_invariance(swap_u, real_su2(a)).preserves_diagonal == preserved


def test_standard_masa_with_trivial_z(swap_u):
    direct = decide_diagonal_invariance(swap_u)
    via = standard_masa_invariance(swap_u, AlgebraElement.identity(2))
    assert via.preserves_diagonal == direct.preserves_diagonal
    assert via.subspace_dims == direct.subspace_dims


def test_masa_equal(hadamard_z, swap_u):
    one = AlgebraElement.identity(2)
    phases = AlgebraElement(2, {((1,), (1,)): 1j, ((2,), (2,)): -1.0})
    assert masa_equal(hadamard_z, hadamard_z)
    assert masa_equal(one, phases)
    assert not masa_equal(one, hadamard_z)
    with pytest.raises(DomainError):
        masa_equal(one, swap_u)


def test_masa_equal_gives_same_verdict(swap_u, rotation_w, hadamard_z):
    # hadamard_z times a level-one permutation spans the same standard MASA
    flip = word_sum(2, [((1,), (2,)), ((2,), (1,))])
    other = hadamard_z * flip
    assert masa_equal(hadamard_z, other)
    for u in (swap_u, rotation_w):
        assert (standard_masa_invariance(u, hadamard_z).preserves_diagonal
                == standard_masa_invariance(u, other).preserves_diagonal)


def test_flip_times_x_preserves_every_standard_masa(flip_times_x):
    rng = rng_for(10)
    for z in [random_unitary(2, 1, rng) for _ in range(10)]:
        assert sufficient_cor43(flip_times_x, z)
        assert standard_masa_invariance(flip_times_x, z).preserves_diagonal


def test_cor43_needs_level_one_z(flip_times_x, swap_u):
    with pytest.raises(DomainError):
        sufficient_cor43(flip_times_x, swap_u)


def test_normalizer_thompson(thompson_u):
    for depth in (1, 2, 3):
        check = ad_normalizer_necessary(thompson_u, depth)
        assert check.normalizes
        assert check.regime == "finite-depth"


@pytest.mark.parametrize("theta, a, b, normalizes", [
    (0.0, 1.0, 0.0, True),
    (0.4, 0.0, 1.0, True),
    (0.0, ROOT_HALF, ROOT_HALF, False),
    (1.1, 0.6, 0.8j, False),
])
def test_normalizer_thompson_rotated(thompson_u, theta, a, b, normalizes):
    z = phased_su2(theta, a, b)
    check = ad_normalizer_necessary(lambda_apply(adjoint(z), thompson_u), 2)
    assert check.normalizes == normalizes


def test_normalizer_thompson_grid(thompson_u):
    # only the points with a b = 0 survive, and there lambda_z(D_2) is D_2 itself
    one = AlgebraElement.identity(2)
    for params, z in phased_su2_family(11, thetas=(0.0, np.pi / 4, np.pi / 2)):
        check = ad_normalizer_necessary(lambda_apply(adjoint(z), thompson_u), 3)
        on_axis = params['s'] in (0.0, np.pi / 2)
        assert check.normalizes == on_axis, params
        if on_axis:
            assert masa_equal(one, z)


def test_normalizer_exact_regime(swap_u, rotation_w):
    phases = AlgebraElement(2, {((1,), (1,)): 1j, ((2,), (2,)): 1.0})
    assert ad_normalizer_necessary(phases, 3) == (True, "exact-monomial", 3)
    assert ad_normalizer_necessary(swap_u, 2) == (True, "exact-monomial", 2)
    assert ad_normalizer_necessary(rotation_w, 2) == (False, "exact-monomial", 2)
    assert not ad_normalizer_necessary(random_unitary(2, 2, rng_for(4)), 3).normalizes
    # below the level only the finite-depth necessary test runs, and rotation_w passes it
    assert ad_normalizer_necessary(rotation_w, 1) == (True, "finite-depth", 1)


def test_product_form_span():
    rng = rng_for(9)
    for _ in range(10):
        z = random_unitary(2, 1, rng)
        assert standard_masa_span(z, 3).distance(product_form_span(z, 3)) <= 1e-9
        assert len(standard_masa_span(z, 3)) == 8


def test_restrict_shift(shift_u):
    cmap = restrict_to_diagonal(shift_u, depth=2)
    assert cmap.binary
    assert cmap.level == 3
    for alpha, images in cmap.entries.items():
        assert set(images) == {(i,) + alpha for i in (1, 2)}


def test_restrict_rotation_is_the_shift(rotation_w, shift_u):
    assert restrict_to_diagonal(rotation_w, depth=2).entries == restrict_to_diagonal(shift_u, depth=2).entries


def test_restrict_identity():
    cmap = restrict_to_diagonal(AlgebraElement.identity(2), depth=2)
    assert cmap.entries == {alpha: (alpha,) for alpha in [(1, 1), (1, 2), (2, 1), (2, 2)]}


def test_restrict_swap(swap_u):
    cmap = restrict_to_diagonal(swap_u, depth=2)
    assert cmap.binary
    for alpha, images in cmap.entries.items():
        image = raise_to_profile(lambda_apply(swap_u, AlgebraElement.projection(2, alpha)), {0: 3})
        expected = {a for (a, b), c in image.coefficients.items() if a == b and abs(c - 1) <= 1e-9}
        assert set(images) == expected
        assert len(images) == 2


def test_restrict_refuses_non_invariant():
    with pytest.raises(DomainError, match="run the decision first"):
        restrict_to_diagonal(izumi_unitary(Z2), 2)


def test_level_one_decision_is_monomiality():
    assert decide_diagonal_invariance(real_su2(0.0)).preserves_diagonal
    assert not decide_diagonal_invariance(real_su2(0.6)).preserves_diagonal
    assert decide_diagonal_invariance(AlgebraElement(2, {((1,), (1,)): 1j, ((2,), (2,)): 1.0})).R == 1

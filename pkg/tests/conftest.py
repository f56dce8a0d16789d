import math
import os

import pytest

from cuntzendo.core.algebra import AlgebraElement
from cuntzendo.core.data_loader import load_element

ELEMENTS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'reference', 'elements')

ROOT_HALF = 1 / math.sqrt(2)


def element_path(name):
    return os.path.join(ELEMENTS_DIR, f"{name}.json")


def word_sum(n, keys, coeff=1.0):
    return AlgebraElement(n, {(tuple(a), tuple(b)): coeff for a, b in keys})


@pytest.fixture
def identity():
    return AlgebraElement.identity(2)


@pytest.fixture
def shift_u():
    """sum_ij S_i S_j S_i^* S_j^*, the unitary of the canonical shift."""
    return load_element(element_path('shift'))


@pytest.fixture
def swap_u():
    """S_1(S_1 S_2^* + S_2 S_1^*)S_1^* + P_2."""
    return load_element(element_path('swap_11_12'))


@pytest.fixture
def hadamard_z():
    return load_element(element_path('hadamard_z'))


@pytest.fixture
def thompson_u():
    return load_element(element_path('thompson_u'))


@pytest.fixture
def rotation_w():
    return load_element(element_path('rotation_w'))


def rotation_w_of(a, b, c, d):
    """Level-two unitary with rows [a, b, 0, 0], [0, 0, c, d], [-b*, a*, 0, 0], [0, 0, -d*, c*]."""
    conj = complex.conjugate
    return AlgebraElement(2, {
        ((1, 1), (1, 1)): a, ((1, 1), (1, 2)): b,
        ((1, 2), (2, 1)): c, ((1, 2), (2, 2)): d,
        ((2, 1), (1, 1)): -conj(complex(b)), ((2, 1), (1, 2)): conj(complex(a)),
        ((2, 2), (2, 1)): -conj(complex(d)), ((2, 2), (2, 2)): conj(complex(c)),
    })


@pytest.fixture
def flip_times_x():
    """Flip on the two letters followed by phi(S_1 S_2^* + S_2 S_1^*)."""
    flip = word_sum(2, [((1, 1), (1, 1)), ((1, 2), (2, 1)), ((2, 1), (1, 2)), ((2, 2), (2, 2))])
    x = word_sum(2, [((1, 1), (1, 2)), ((1, 2), (1, 1)), ((2, 1), (2, 2)), ((2, 2), (2, 1))])
    return flip * x

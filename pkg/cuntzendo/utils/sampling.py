"""
Seeded sample unitaries and the one-parameter families scanned by masa-scan.
"""
import math

import numpy as np
from scipy.stats import unitary_group

from cuntzendo.core.errors import UsageError
from cuntzendo.core.matrix import from_block

FAMILIES = ("real-su2", "phased-su2")


def rng_for(seed):
    return np.random.default_rng(seed)


def element_of(mat, n):
    return from_block(mat, n)


def random_unitary(n, k, rng):
    """Haar random unitary of F_n^k."""
    return element_of(unitary_group.rvs(n ** k, random_state=rng), n)


def random_monomial_unitary(n, k, rng):
    """s d with s a random permutation matrix and d random phases."""
    dim = n ** k
    mat = np.zeros((dim, dim), dtype=complex)
    phases = np.exp(2j * np.pi * rng.random(dim))
    mat[rng.permutation(dim), np.arange(dim)] = phases
    return element_of(mat, n)


def real_su2(a):
    """z = a P_1 + b S_2 S_1^* - b S_1 S_2^* + a P_2 with b = sqrt(1 - a^2)."""
    if not 0.0 <= a <= 1.0:
        raise UsageError(f"real-su2 parameter must lie in [0, 1], got {a}")
    b = math.sqrt(max(0.0, 1.0 - a * a))
    return element_of(np.array([[a, -b], [b, a]], dtype=complex), 2)


def real_su2_angle(t):
    return element_of(np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]], dtype=complex), 2)


def phased_su2(theta, a, b):
    """
    z = e^(i theta) a P_1 + e^(i theta) b S_2 S_1^* - conj(b) S_1 S_2^* + conj(a) P_2, letters 1-based.

    With 0-based letters, a S_{0,0} + b S_{0,1} - conj(b) S_{1,0} + conj(a) S_{1,1}
    (S_{i,j} = S_i S_j^*) is phased_su2(0, a, -conj(b)): the off-diagonal entries trade places.
    """
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-12:
        raise UsageError(f"phased-su2 needs |a|^2 + |b|^2 = 1, got {abs(a) ** 2 + abs(b) ** 2}")
    phase = complex(math.cos(theta), math.sin(theta))
    mat = np.array([[phase * a, -np.conj(b)], [phase * b, np.conj(a)]], dtype=complex)
    return element_of(mat, 2)


def real_su2_family(steps):
    """Angles t on [0, pi/2]; a = cos t, so odd step counts hit a = 1/sqrt(2) at the midpoint."""
    if steps < 1:
        raise UsageError(f"steps must be >= 1, got {steps}")
    for t in np.linspace(0.0, math.pi / 2, steps):
        yield {'t': float(t), 'a': math.cos(t), 'b': math.sin(t)}, real_su2_angle(t)


def phased_su2_family(steps, thetas=(0.0,)):
    """
    For every global phase theta, a steps x steps grid of
    a = cos s, b = e^(i psi) sin s, s in [0, pi/2], psi in [0, 2 pi).
    """
    if steps < 1:
        raise UsageError(f"steps must be >= 1, got {steps}")
    for theta in thetas:
        for s in np.linspace(0.0, math.pi / 2, steps):
            for psi in np.linspace(0.0, 2 * math.pi, steps, endpoint=False):
                a = complex(math.cos(s))
                b = complex(math.cos(psi), math.sin(psi)) * math.sin(s)
                params = {'theta': float(theta), 's': float(s), 'psi': float(psi),
                          'a_re': a.real, 'b_re': b.real, 'b_im': b.imag}
                yield params, phased_su2(theta, a, b)


def family(name, steps, thetas=(0.0,)):
    if name == "real-su2":
        return real_su2_family(steps)
    if name == "phased-su2":
        return phased_su2_family(steps, thetas)
    raise UsageError(f"unknown family '{name}', expected one of {', '.join(FAMILIES)}")

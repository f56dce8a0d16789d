"""
The correspondence u <-> lambda_u between unitaries of O_n and unital
endomorphisms, lambda_u(S_i) = u S_i, together with permutation unitaries,
induced permutations and the commutation tests against the gauge action and
the Bogolyubov automorphisms.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.stats import unitary_group

from cuntzendo.core.algebra import (AlgebraElement, adjoint, gauge_decompose, linear_combination,
                                    max_difference, mul, u_tower, words)
from cuntzendo.core.errors import DomainError, ResourceError, UsageError
from cuntzendo.core.matrix import (MatrixRep, element_level, from_block, from_matrix, index_word, is_unitary_matrix,
                                   to_block, to_matrix, tower_matrix, word_index)
from cuntzendo.core.settings import current, resolve_eps


@dataclass(frozen=True)
class PermutationMap:
    """A bijection sigma of W_n^k, stored as (source, target) pairs."""
    n: int
    k: int
    pairs: tuple

    def __post_init__(self):
        pairs = tuple((tuple(s), tuple(t)) for s, t in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        domain = set(words(self.n, self.k))
        sources = [s for s, _ in pairs]
        targets = [t for _, t in pairs]
        if len(pairs) != len(domain) or set(sources) != domain or set(targets) != domain:
            raise DomainError(f"map is not a bijection of the {len(domain)} words of length {self.k} over n={self.n}")

    @classmethod
    def from_function(cls, n, k, f):
        return cls(n, k, tuple((alpha, tuple(f(alpha))) for alpha in words(n, k)))

    @classmethod
    def identity(cls, n, k):
        return cls.from_function(n, k, lambda alpha: alpha)

    @classmethod
    def from_unitary(cls, u, k=None, eps=None):
        """Recover sigma from a permutation unitary; None if u is not one at level k."""
        k = element_level(u) if k is None else k
        mat = to_matrix(u, k).entries
        eps = resolve_eps(eps)
        pairs = []
        for col in range(mat.shape[1]):
            rows = np.nonzero(np.abs(mat[:, col]) > eps)[0]
            if len(rows) != 1 or abs(mat[rows[0], col] - 1) > eps:
                return None
            pairs.append((index_word(col, u.n, k), index_word(int(rows[0]), u.n, k)))
        try:
            return cls(u.n, k, tuple(pairs))
        except DomainError:
            return None

    @classmethod
    def all_maps(cls, n, k):
        """Every bijection of W_n^k, in lexicographic order of the image list."""
        domain = list(words(n, k))
        for image in itertools.permutations(domain):
            yield cls(n, k, tuple(zip(domain, image)))

    @property
    def mapping(self):
        return dict(self.pairs)

    def __call__(self, alpha):
        return self.mapping[tuple(alpha)]


@dataclass(frozen=True)
class InducedPermutation:
    """sigma(alpha) = (alpha_omega(1), ..., alpha_omega(k)) for omega in Sym(k), 1-based."""
    k: int
    omega: tuple

    def apply(self, alpha):
        return tuple(alpha[i - 1] for i in self.omega)

    def to_map(self, n):
        return PermutationMap.from_function(n, self.k, self.apply)


def permutation_unitary(p):
    """u = sum_alpha S_sigma(alpha) S_alpha^*."""
    return AlgebraElement._build(p.n, {(target, source): 1.0 for source, target in p.pairs})


def permutation_matrix(p):
    dim = p.n ** p.k
    mat = np.zeros((dim, dim), dtype=complex)
    for source, target in p.pairs:
        mat[word_index(target, p.n), word_index(source, p.n)] = 1.0
    return mat


def detect_induced(p):
    """Search Sym(k) for an omega inducing p; None when there is none."""
    guard = current().induced_guard
    if p.k > guard:
        raise ResourceError(f"induced-permutation search over Sym({p.k}) exceeds the guard k <= {guard}")
    mapping = p.mapping
    for omega in itertools.permutations(range(1, p.k + 1)):
        candidate = InducedPermutation(p.k, omega)
        if all(candidate.apply(alpha) == target for alpha, target in mapping.items()):
            return candidate
    return None


# --- applying endomorphisms ---

def lambda_apply(u, x):
    """
    lambda_u(x) with lambda_u(S_alpha S_beta^*) = u_|alpha| S_alpha S_beta^* u_|beta|^*.

    Core unitaries go through tower matrices one gauge component at a time;
    unitaries with mixed gauge degrees use the word calculus.
    """
    if u.n != x.n:
        raise UsageError(f"unitary is in O_{u.n} but the element is in O_{x.n}")
    if u.is_gauge_invariant():
        return _lambda_apply_matrix(u, x)
    return _lambda_apply_words(u, x)


def _lambda_apply_matrix(u, x):
    n = u.n
    k = element_level(u)
    pad = np.eye(n ** (k - 1), dtype=complex)
    towers = {}

    def tower(m):
        if m not in towers:
            towers[m] = tower_matrix(u, m, k)
        return towers[m]

    parts = []
    for d, comp in gauge_decompose(x).components.items():
        q = max(len(b) for _, b in comp.coefficients)
        p = q + d
        block = np.kron(to_block(comp, p, q), pad)
        parts.append((1.0, from_block(tower(p) @ block @ tower(q).conj().T, n)))
    return linear_combination(n, parts)


def _lambda_apply_words(u, x):
    n = u.n
    towers = {0: AlgebraElement.identity(n)}

    def tower(m):
        if m not in towers:
            towers[m] = u_tower(u, m)
        return towers[m]

    parts = []
    for (a, b), c in x.coefficients.items():
        word = AlgebraElement._build(n, {(a, b): 1.0})
        parts.append((c, mul(mul(tower(len(a)), word), adjoint(tower(len(b))))))
    return linear_combination(n, parts)


def core_product(x, y):
    """x*y, through matrices when both factors lie in the core."""
    if x.is_gauge_invariant() and y.is_gauge_invariant() and len(x) and len(y):
        level = max(element_level(x), element_level(y))
        mat = to_matrix(x, level).entries @ to_matrix(y, level).entries
        return from_matrix(MatrixRep(x.n, level, mat))
    return mul(x, y)


def compose_endos(u, w):
    """The unitary of lambda_u o lambda_w, namely lambda_u(w) u."""
    if u.n != w.n:
        raise UsageError(f"cannot compose endomorphisms of O_{u.n} and O_{w.n}")
    return core_product(lambda_apply(u, w), u)


def endo_images(u):
    """lambda_u(S_i) = u S_i for i = 1..n."""
    return [mul(u, AlgebraElement.generator(u.n, i)) for i in range(1, u.n + 1)]


def unitary_of_endo(images, eps=None):
    """
    u = sum_i rho(S_i) S_i^* for images rho(S_1), ..., rho(S_n).

    The images must satisfy the Cuntz relations within eps.
    """
    if len(images) < 2:
        raise UsageError(f"need n >= 2 images, got {len(images)}")
    n = len(images)
    if any(img.n != n for img in images):
        raise UsageError(f"all {n} images must live in O_{n}")
    one = AlgebraElement.identity(n)
    zero = AlgebraElement.zero(n)
    for i, j in itertools.product(range(n), repeat=2):
        target = one if i == j else zero
        gap = max_difference(mul(adjoint(images[i]), images[j]), target)
        if gap > resolve_eps(eps):
            raise DomainError(f"relation S_{i + 1}'^* S_{j + 1}' = {int(i == j)} fails with residual {gap:.3g}")
    total = linear_combination(n, [(1.0, mul(img, adjoint(img))) for img in images])
    gap = max_difference(total, one)
    if gap > resolve_eps(eps):
        raise DomainError(f"relation sum_i S_i' S_i'^* = 1 fails with residual {gap:.3g}")
    return linear_combination(n, [(1.0, mul(img, AlgebraElement.word(n, (), (i,))))
                                  for i, img in enumerate(images, start=1)])


# --- commutation tests ---

def gauge_commutation_test(u):
    """True iff u has no component of nonzero gauge degree."""
    return all(d == 0 for d in gauge_decompose(u).degrees)


def induced_permutation_matrices(n, k):
    guard = current().induced_guard
    if k > guard:
        raise ResourceError(f"Sym({k}) has {math.factorial(k)} elements, above the guard k <= {guard}")
    return [permutation_matrix(InducedPermutation(k, omega).to_map(n))
            for omega in itertools.permutations(range(1, k + 1))]


def induced_span_dimension(n, k):
    mats = induced_permutation_matrices(n, k)
    return int(np.linalg.matrix_rank(np.column_stack([m.reshape(-1) for m in mats])))


class WeylResult(NamedTuple):
    commutes: bool
    residual: float
    span_dim: int
    random_agrees: bool
    seed: int


def weyl_commutation_test(u, k=None, eps=None, samples=None, seed=None):
    """
    Decide whether u in F_n^k commutes with every z^(x)k, z in U(F_n^1), by
    projecting u onto the span of the induced-permutation matrices.

    A seeded random check with `samples` unitaries z runs alongside; only the
    projection decides, a disagreement is logged.
    """
    settings = current()
    k = element_level(u) if k is None else k
    eps = resolve_eps(eps)
    samples = settings.weyl_samples if samples is None else samples
    seed = settings.seed if seed is None else seed
    mat = to_matrix(u, k).entries
    if not is_unitary_matrix(mat, eps):
        raise DomainError("Weyl commutation test needs a unitary input")

    basis = np.column_stack([m.reshape(-1) for m in induced_permutation_matrices(u.n, k)])
    target = mat.reshape(-1)
    coeffs, *_ = np.linalg.lstsq(basis, target, rcond=None)
    residual = float(np.linalg.norm(basis @ coeffs - target))
    commutes = residual <= eps
    span_dim = int(np.linalg.matrix_rank(basis))

    rng = np.random.default_rng(seed)
    random_commutes = True
    for _ in range(samples):
        z = unitary_group.rvs(u.n, random_state=rng)
        zk = z
        for _ in range(k - 1):
            zk = np.kron(zk, z)
        if np.max(np.abs(zk @ mat - mat @ zk)) > max(eps, 1e-9):
            random_commutes = False
            break
    random_agrees = samples == 0 or random_commutes == commutes
    if not random_agrees:
        logging.warning(f"weyl test: projection says commutes={commutes} (residual {residual:.3g}) "
                        f"but {samples} random unitaries (seed {seed}) say {random_commutes}")
    logging.debug(f"weyl test: residual {residual:.3g}, span dimension {span_dim}")
    return WeylResult(bool(commutes), residual, span_dim, bool(random_agrees), seed)


def commutes_with_bogolyubov(u, z, k=None, eps=None):
    """z_k u = u z_k at level k for one level-1 unitary z."""
    k = element_level(u) if k is None else k
    zk = tower_matrix(z, k, 1)
    mat = to_matrix(u, k).entries
    return bool(np.max(np.abs(zk @ mat - mat @ zk)) <= resolve_eps(eps))

"""
The diagonal MASA D_n and its Bogolyubov images (standard MASAs).

decide_diagonal_invariance runs the finite subspace iteration on F_n^(k-1)
for w in U(F_n^k): starting from C1, each round pushes the new basis vectors
x through Ad w o phi, requires the image to be diagonal at level k and adds
its diagonal slices E_jj back into the subspace. The chain stops as soon as it
stops growing. oracle_direct_check conjugates every cylinder projection
directly and serves as an independent cross-check.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from cuntzendo.core.algebra import AlgebraElement, adjoint, gauge_decompose, mul, raise_to_profile, words
from cuntzendo.core.errors import DomainError, UsageError
from cuntzendo.core.matrix import (MatrixRep, Subspace, element_level, from_matrix, index_word, is_diagonal_matrix,
                                   is_monomial, is_monomial_matrix, is_unitary_matrix, matrix_unit_slice, to_matrix,
                                   tower_matrix, word_index)
from cuntzendo.core.settings import resolve_eps

ITERATIVE = "iterative"
DIRECT_ORACLE = "direct-oracle"


@dataclass
class DecisionReport:
    n: int
    k: int
    preserves_diagonal: bool
    R: int
    subspace_dims: list = field(default_factory=list)
    witness: Optional[AlgebraElement] = None
    method: str = ITERATIVE
    eps: float = 1e-9


@dataclass
class CylinderMap:
    """
    lambda_w restricted to cylinder projections: P_alpha -> sum of P_gamma.

    `weights` is filled only when some image has coefficients outside {0, 1}.
    """
    depth: int
    level: int
    entries: dict
    weights: Optional[dict] = None

    @property
    def binary(self):
        return self.weights is None


# --- membership ---

def is_diagonal(x, eps=None):
    """x in D_n: no off-diagonal mass once every degree-0 term is raised to a common level."""
    eps = resolve_eps(eps)
    parts = gauge_decompose(x)
    for d in parts.degrees:
        if d != 0 and not parts.component(d).is_zero(eps):
            return False
    core = parts.component(0)
    if not len(core):
        return True
    raised = raise_to_profile(core, {0: core.level})
    return all(abs(c) <= eps for (a, b), c in raised.coefficients.items() if a != b)


def _diagonal_projection(n, k, i):
    """P_i at level k, i.e. P_i (x) I."""
    mat = np.zeros((n, n), dtype=complex)
    mat[i - 1, i - 1] = 1.0
    return np.kron(mat, np.eye(n ** (k - 1)))


def e_slices(a, k):
    """
    The n x n array of slices E_ij(a) in F_n^(k-1), determined by
    a = sum_ij E_ij(a) phi^(k-1)(S_i S_j^*).
    """
    if k < 1:
        raise UsageError(f"slices need k >= 1, got {k}")
    mat = to_matrix(a, k).entries
    n = a.n
    return [[from_matrix(MatrixRep(n, k - 1, matrix_unit_slice(mat, n, i, j).copy()))
             for j in range(1, n + 1)] for i in range(1, n + 1)]


def _checked_unitary(w, k, eps):
    if k is not None and k < 1:
        raise UsageError(f"decision needs k >= 1, got {k}")
    k = element_level(w) if k is None else k
    mat = to_matrix(w, k).entries
    if not is_unitary_matrix(mat, eps):
        raise DomainError(f"w is not unitary in F_{w.n}^{k} within eps={eps}")
    return k, mat


# --- the decision procedure ---

def decide_diagonal_invariance(w, k=None, eps=None):
    """
    Decide lambda_w(D_n) <= D_n for a unitary w in F_n^k.

    Witness selection is deterministic: basis projections P_1..P_n first,
    then subspace basis vectors in insertion order.
    """
    eps = resolve_eps(eps)
    k, mat = _checked_unitary(w, k, eps)
    n = w.n
    low = n ** (k - 1)
    wstar = mat.conj().T

    def fail(image, r, dims):
        logging.info(f"decide: lambda_w leaves D_{n} at step {r}")
        witness = from_matrix(MatrixRep(n, k, image), eps)
        return DecisionReport(n, k, False, r, dims, witness, ITERATIVE, eps)

    space = Subspace(low * low, tol=eps).extend([np.eye(low).reshape(-1)])[0]
    dims = [len(space)]

    # step 1: x runs over the minimal projections of D_n^1
    fresh = []
    for i in range(1, n + 1):
        image = mat @ _diagonal_projection(n, k, i) @ wstar
        if not is_diagonal_matrix(image, eps):
            return fail(image, 1, dims)
        fresh.extend(_diagonal_slices(image, n))
    start = len(space)
    space, _ = space.extend(fresh)
    dims.append(len(space))
    new_vectors = space.vectors()[start:]
    r = 1

    while dims[-1] != dims[-2]:
        r += 1
        fresh = []
        for x in new_vectors:
            image = mat @ np.kron(np.eye(n), x.reshape(low, low)) @ wstar
            if not is_diagonal_matrix(image, eps):
                return fail(image, r, dims)
            fresh.extend(_diagonal_slices(image, n))
        start = len(space)
        space, _ = space.extend(fresh)
        dims.append(len(space))
        new_vectors = space.vectors()[start:]
        logging.debug(f"decide: step {r}, subspace dimension {dims[-1]}")

    logging.info(f"decide: lambda_w preserves D_{n}, R={r}, dims={dims}")
    return DecisionReport(n, k, True, r, dims, None, ITERATIVE, eps)


def _diagonal_slices(image, n):
    return [matrix_unit_slice(image, n, j, j).reshape(-1) for j in range(1, n + 1)]


# --- direct oracle ---

def _first_offdiagonal_image(w, k, depth, eps):
    """First lambda_w(P_alpha), |alpha| <= depth, that is not diagonal, with its level."""
    n = w.n
    pad = n ** (k - 1)
    for m in range(1, depth + 1):
        tower = tower_matrix(w, m, k)
        for alpha in words(n, m):
            start = word_index(alpha, n) * pad
            cols = tower[:, start:start + pad]
            image = cols @ cols.conj().T
            if not is_diagonal_matrix(image, eps):
                return image, m + k - 1
    return None


def oracle_direct_check(w, k=None, depth=3, eps=None):
    """lambda_w(P_alpha) = w_m P_alpha w_m^* is diagonal for every |alpha| = m <= depth."""
    eps = resolve_eps(eps)
    k, _ = _checked_unitary(w, k, eps)
    return _first_offdiagonal_image(w, k, depth, eps) is None


def oracle_report(w, k=None, depth=3, eps=None):
    eps = resolve_eps(eps)
    k, _ = _checked_unitary(w, k, eps)
    found = _first_offdiagonal_image(w, k, depth, eps)
    witness = None
    if found is not None:
        image, level = found
        witness = from_matrix(MatrixRep(w.n, level, image), eps)
    return DecisionReport(w.n, k, found is None, depth, [], witness, DIRECT_ORACLE, eps)


# --- sufficient conditions ---

def _span_of(mats, eps):
    dim = mats[0].size
    return Subspace.spanned_by([m.reshape(-1) for m in mats], dim, eps)


def _spans_equal(left, right, eps):
    a = _span_of(left, eps)
    b = _span_of(right, eps)
    return a.contains_subspace(b) and b.contains_subspace(a)


def sufficient_cor42(w, k=None, eps=None):
    """w D_n^1 w^* = phi^(k-1)(D_n^1), compared as subspaces of F_n^k."""
    eps = resolve_eps(eps)
    k, mat = _checked_unitary(w, k, eps)
    n = w.n
    images = [mat @ _diagonal_projection(n, k, i) @ mat.conj().T for i in range(1, n + 1)]
    tails = [np.kron(np.eye(n ** (k - 1)), _diagonal_projection(n, 1, i)) for i in range(1, n + 1)]
    return _spans_equal(images, tails, eps)


def sufficient_prop45(w, k=None, eps=None):
    """
    w D_n^1 w^* <= D_n^k, and w commutes with phi^r(w P_i w^*) for
    r = 1..k-1 and every i.
    """
    eps = resolve_eps(eps)
    k, mat = _checked_unitary(w, k, eps)
    n = w.n
    images = [mat @ _diagonal_projection(n, k, i) @ mat.conj().T for i in range(1, n + 1)]
    if not all(is_diagonal_matrix(a, eps) for a in images):
        return False
    for r in range(1, k):
        wide = np.kron(mat, np.eye(n ** r))
        for a in images:
            shifted = np.kron(np.eye(n ** r), a)
            if np.max(np.abs(wide @ shifted - shifted @ wide)) > eps:
                return False
    return True


def sufficient_cor43(u, z, eps=None):
    """u (z D_n^1 z^*) u^* = phi^(k-1)(z D_n^1 z^*); implies lambda_z(D_n) is lambda_u-invariant."""
    eps = resolve_eps(eps)
    zmat = _level_one(z, eps)
    k, mat = _checked_unitary(u, None, eps)
    n = u.n
    rotated = [zmat @ _diagonal_projection(n, 1, i) @ zmat.conj().T for i in range(1, n + 1)]
    pad = np.eye(n ** (k - 1))
    images = [mat @ np.kron(a, pad) @ mat.conj().T for a in rotated]
    tails = [np.kron(pad, a) for a in rotated]
    return _spans_equal(images, tails, eps)


# --- standard MASAs ---

def _level_one(z, eps):
    if not z.is_gauge_invariant() or z.level > 1:
        raise DomainError("Bogolyubov unitaries must lie in F_n^1")
    zmat = to_matrix(z, 1).entries
    if not is_unitary_matrix(zmat, eps):
        raise DomainError(f"z is not unitary within eps={eps}")
    return zmat


def conjugate_by_bogolyubov(u, z, eps=None):
    """lambda_(z^*)(u) = z_k^* u z_k for u in F_n^k and z in U(F_n^1)."""
    eps = resolve_eps(eps)
    _level_one(z, eps)
    k = element_level(u)
    zk = tower_matrix(z, k, 1)
    mat = zk.conj().T @ to_matrix(u, k).entries @ zk
    return from_matrix(MatrixRep(u.n, k, mat), eps)


def standard_masa_invariance(u, z, eps=None):
    """lambda_u(lambda_z(D_n)) <= lambda_z(D_n), decided on the conjugated unitary."""
    eps = resolve_eps(eps)
    k = element_level(u)
    return decide_diagonal_invariance(conjugate_by_bogolyubov(u, z, eps), k, eps)


def masa_equal(w, z, eps=None):
    """lambda_w(D_n) = lambda_z(D_n) iff w^* z is monomial at level 1."""
    eps = resolve_eps(eps)
    wmat = _level_one(w, eps)
    zmat = _level_one(z, eps)
    return is_monomial_matrix(wmat.conj().T @ zmat, eps)


class NormalizerCheck(NamedTuple):
    normalizes: bool
    regime: str
    depth: int


def ad_normalizer_necessary(v, depth=3, eps=None):
    """
    Necessary test for v in N(D_n): v P_alpha v^* is diagonal for all |alpha| <= depth.

    A core unitary whose level fits within `depth` gets the exact monomial test.
    """
    eps = resolve_eps(eps)
    if v.is_gauge_invariant() and max(1, v.level) <= depth:
        return NormalizerCheck(is_monomial(v, max(1, v.level), eps), "exact-monomial", depth)
    vstar = adjoint(v)
    for m in range(1, depth + 1):
        for alpha in words(v.n, m):
            image = mul(mul(v, AlgebraElement.projection(v.n, alpha)), vstar)
            if not is_diagonal(image, eps):
                logging.debug(f"normalizer test: v P_{list(alpha)} v^* leaves the diagonal")
                return NormalizerCheck(False, "finite-depth", depth)
    return NormalizerCheck(True, "finite-depth", depth)


def standard_masa_span(z, k, eps=None):
    """lambda_z(D_n^k) as a subspace of vectorised F_n^k."""
    eps = resolve_eps(eps)
    _level_one(z, eps)
    zk = tower_matrix(z, k, 1)
    n = z.n
    mats = []
    for alpha in words(n, k):
        idx = word_index(alpha, n)
        col = zk[:, idx:idx + 1]
        mats.append(col @ col.conj().T)
    return _span_of(mats, eps)


def product_form_span(z, k, eps=None):
    """Span of a_0 phi(a_1) ... phi^(k-1)(a_(k-1)) with each a_i in lambda_z(D_n^1)."""
    eps = resolve_eps(eps)
    zmat = _level_one(z, eps)
    n = z.n
    basis = [zmat @ _diagonal_projection(n, 1, i) @ zmat.conj().T for i in range(1, n + 1)]
    mats = []
    for choice in itertools.product(basis, repeat=k):
        prod = np.eye(1)
        for a in choice:
            prod = np.kron(prod, a)
        mats.append(prod)
    return _span_of(mats, eps)


# --- restriction to the diagonal ---

def restrict_to_diagonal(w, k=None, depth=2, eps=None):
    """
    The block map alpha -> {gamma : P_gamma occurs in lambda_w(P_alpha)} for |alpha| = depth.

    Words gamma have length depth + k - 1.
    """
    eps = resolve_eps(eps)
    report = decide_diagonal_invariance(w, k, eps)
    if not report.preserves_diagonal:
        raise DomainError("lambda_w does not preserve the diagonal; run the decision first")
    k = report.k
    n = w.n
    level = depth + k - 1
    pad = n ** (k - 1)
    tower = tower_matrix(w, depth, k)
    entries = {}
    weights = {}
    binary = True
    for alpha in words(n, depth):
        start = word_index(alpha, n) * pad
        cols = tower[:, start:start + pad]
        diag = np.real(np.einsum("ij,ij->i", cols, cols.conj()))
        support = [i for i, c in enumerate(diag) if abs(c) > eps]
        entries[alpha] = tuple(index_word(i, n, level) for i in support if abs(diag[i] - 1) <= eps)
        weights[alpha] = {index_word(i, n, level): float(diag[i]) for i in support}
        if any(abs(diag[i] - 1) > eps for i in support):
            binary = False
    if not binary:
        logging.warning("restrict: images carry coefficients outside {0, 1}, emitting weights")
    return CylinderMap(depth, level, entries, None if binary else weights)

"""
Matrix picture of the core: F_n^k is M_{n^k}(C), rows and columns indexed by
W_n^k in lexicographic order (first letter most significant, so the first
letter is the first tensor factor and phi(x) = I_n (x) x).

Homogeneous elements of gauge degree d = p - q get a rectangular picture with
n^p rows and n^q columns; products of such blocks agree with products in O_n.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import subspace_angles

from cuntzendo.core.algebra import AlgebraElement
from cuntzendo.core.errors import DomainError, UsageError
from cuntzendo.core.settings import check_dimension, resolve_eps


@dataclass(frozen=True, eq=False)
class MatrixRep:
    n: int
    k: int
    entries: np.ndarray

    @property
    def dim(self):
        return self.n ** self.k

    def embed(self, level):
        """Same element at a higher level: tensor by the identity on the right."""
        if level < self.k:
            raise UsageError(f"cannot embed a level-{self.k} matrix at level {level}")
        check_dimension(self.n, level)
        pad = np.eye(self.n ** (level - self.k), dtype=complex)
        return MatrixRep(self.n, level, np.kron(self.entries, pad))

    def to_json(self):
        return [[[float(z.real), float(z.imag)] for z in row] for row in self.entries]


def word_index(word, n):
    idx = 0
    for letter in word:
        idx = idx * n + (letter - 1)
    return idx


def index_word(idx, n, k):
    letters = []
    for _ in range(k):
        idx, r = divmod(idx, n)
        letters.append(r + 1)
    return tuple(reversed(letters))


def element_level(x):
    """Smallest level k >= 1 at which x has a square matrix picture."""
    if not x.is_gauge_invariant():
        raise DomainError(f"element has gauge degrees {x.degrees()}, it is not in the core F_n")
    return max(1, x.level)


def to_block(x, rows_level, cols_level):
    """Rectangular picture of a homogeneous element of degree rows_level - cols_level."""
    n = x.n
    d = rows_level - cols_level
    if cols_level < 0 or rows_level < 0:
        raise UsageError(f"levels must be >= 0, got {rows_level}x{cols_level}")
    check_dimension(n, max(rows_level, cols_level))
    block = np.zeros((n ** rows_level, n ** cols_level), dtype=complex)
    for (a, b), c in x.coefficients.items():
        if len(a) - len(b) != d:
            raise DomainError(f"term S{list(a)}S{list(b)}* has degree {len(a) - len(b)}, expected {d}")
        extra = cols_level - len(b)
        if extra < 0:
            raise DomainError(f"term S{list(a)}S{list(b)}* does not fit at column level {cols_level}")
        size = n ** extra
        offset = np.arange(size)
        block[word_index(a, n) * size + offset, word_index(b, n) * size + offset] += c
    return block


def from_block(block, n, eps=None, compress=True):
    """Element whose rectangular picture is `block`; entries with modulus <= eps are dropped."""
    block = np.asarray(block, dtype=complex)
    rows_level = _level_of(block.shape[0], n)
    cols_level = _level_of(block.shape[1], n)
    eps = resolve_eps(eps)
    terms = {}
    for r, c in zip(*np.nonzero(np.abs(block) > eps)):
        terms[(index_word(r, n, rows_level), index_word(c, n, cols_level))] = complex(block[r, c])
    x = AlgebraElement._build(n, terms, eps)
    return x.compressed() if compress else x


def _level_of(size, n):
    level = 0
    while n ** level < size:
        level += 1
    if n ** level != size:
        raise UsageError(f"dimension {size} is not a power of n={n}")
    return level


def to_matrix(x, k):
    """The n^k x n^k matrix of x in F_n^k."""
    if not x.is_gauge_invariant():
        raise DomainError(f"element has gauge degrees {x.degrees()}, it is not in F_n^{k}")
    if x.level > k:
        raise DomainError(f"element needs level {x.level}, it is not in F_n^{k}")
    return MatrixRep(x.n, k, to_block(x, k, k))


def from_matrix(m, eps=None, compress=True):
    return from_block(m.entries, m.n, eps, compress)


def tower_matrix(u, m, k=None):
    """
    Matrix of u_m = u phi(u) ... phi^(m-1)(u) at level m + k - 1, for u in F_n^k.

    u_0 = 1 is returned at level k - 1.
    """
    k = element_level(u) if k is None else k
    n = u.n
    check_dimension(n, m + k - 1)
    base = to_matrix(u, k).entries
    result = np.eye(n ** (m + k - 1), dtype=complex)
    for j in range(m):
        factor = np.kron(np.kron(np.eye(n ** j), base), np.eye(n ** (m - 1 - j)))
        result = result @ factor
    return result


def is_unitary_matrix(mat, eps=None):
    eps = resolve_eps(eps)
    ident = np.eye(mat.shape[0])
    return (np.max(np.abs(mat @ mat.conj().T - ident)) <= eps
            and np.max(np.abs(mat.conj().T @ mat - ident)) <= eps)


def is_unitary(x, k=None, eps=None):
    k = element_level(x) if k is None else k
    return bool(is_unitary_matrix(to_matrix(x, k).entries, eps))


def is_monomial_matrix(mat, eps=None):
    big = np.abs(mat) > resolve_eps(eps)
    return bool(np.all(big.sum(axis=0) == 1) and np.all(big.sum(axis=1) == 1))


def is_monomial(x, k=None, eps=None):
    """One entry of modulus > eps in each row and column; x must be unitary."""
    k = element_level(x) if k is None else k
    mat = to_matrix(x, k).entries
    if not is_unitary_matrix(mat, eps):
        raise DomainError("monomial test needs a unitary input")
    return is_monomial_matrix(mat, eps)


def is_diagonal_matrix(mat, eps=None):
    eps = resolve_eps(eps)
    scale = max(1.0, float(np.max(np.abs(mat), initial=0.0)))
    off = mat - np.diag(np.diag(mat))
    return bool(np.max(np.abs(off), initial=0.0) <= eps * scale)


def matrix_unit_slice(mat, n, i, j):
    """E_ij: the (i, j) coordinate of the last tensor factor, a matrix one level down."""
    size = mat.shape[0] // n
    return mat.reshape(size, n, size, n)[:, i - 1, :, j - 1]


class Subspace:
    """
    Linear subspace of C^dim held by an orthonormal basis (columns of `basis`).

    Instances are immutable; extend returns a new Subspace.
    """
    __slots__ = ("dim", "basis", "tol")

    def __init__(self, dim, basis=None, tol=None):
        self.dim = dim
        self.tol = resolve_eps(tol)
        self.basis = np.zeros((dim, 0), dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
        if self.basis.shape[0] != dim:
            raise UsageError(f"basis vectors have length {self.basis.shape[0]}, expected {dim}")

    @classmethod
    def spanned_by(cls, vectors, dim, tol=None):
        return cls(dim, tol=tol).extend(vectors)[0]

    def __len__(self):
        return self.basis.shape[1]

    @property
    def dimension(self):
        return len(self)

    def vectors(self):
        return [self.basis[:, i] for i in range(len(self))]

    def _residual(self, v):
        r = v - self.basis @ (self.basis.conj().T @ v)
        # second pass keeps the basis orthonormal to machine precision
        return r - self.basis @ (self.basis.conj().T @ r)

    def residual_norm(self, v):
        v = self._check(v)
        return float(np.linalg.norm(self._residual(v)))

    def contains(self, v):
        v = self._check(v)
        return self.residual_norm(v) <= self.tol * max(1.0, float(np.linalg.norm(v)))

    def extend(self, vectors):
        """Gram-Schmidt `vectors` into the basis; returns (new subspace, grew)."""
        basis = self.basis
        grown = Subspace(self.dim, basis, self.tol)
        for v in vectors:
            v = self._check(v)
            r = grown._residual(v)
            norm = float(np.linalg.norm(r))
            if norm > self.tol * max(1.0, float(np.linalg.norm(v))):
                basis = np.column_stack([basis, r / norm])
                grown = Subspace(self.dim, basis, self.tol)
        return grown, len(grown) > len(self)

    def contains_subspace(self, other):
        return all(self.contains(v) for v in other.vectors())

    def distance(self, other):
        """Sine of the largest principal angle; 1.0 when the dimensions differ."""
        if len(self) != len(other):
            return 1.0
        if len(self) == 0:
            return 0.0
        return float(np.sin(np.max(subspace_angles(self.basis, other.basis))))

    def _check(self, v):
        v = np.asarray(v, dtype=complex).reshape(-1)
        if v.shape[0] != self.dim:
            raise UsageError(f"vector has length {v.shape[0]}, subspace lives in C^{self.dim}")
        return v

    def __repr__(self):
        return f"Subspace(dim={len(self)} in C^{self.dim})"


def subspace_extend(space, vectors):
    grown, grew = space.extend(vectors)
    if grew:
        logging.debug(f"subspace grew from {len(space)} to {len(grown)}")
    return grown, grew

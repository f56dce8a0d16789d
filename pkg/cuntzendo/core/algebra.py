"""
Word calculus for the algebraic part of the Cuntz algebra O_n.

An element is a finite linear combination of reduced words S_alpha S_beta^*,
stored as a mapping (alpha, beta) -> complex coefficient. Words are tuples of
1-based letters; the empty tuple is S_0 = 1. Terms are kept at the length they
were produced with, so two elements are compared only after raising both to a
common length profile (S_a S_b^* = sum_j S_aj S_bj^*).
"""
import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import NamedTuple

from cuntzendo.core.errors import UsageError
from cuntzendo.core.settings import check_terms, resolve_eps

# Coefficients of a family S_aj S_bj^* must agree this closely to be merged back.
COMPRESS_TOL = 1e-13


class Term(NamedTuple):
    n: int
    coeff: complex
    alpha: tuple
    beta: tuple

    @property
    def degree(self):
        return len(self.alpha) - len(self.beta)


def words(n, k):
    """All multi-indices of length k in lexicographic order."""
    return itertools.product(range(1, n + 1), repeat=k)


def check_word(n, word, where="word"):
    word = tuple(word)
    for pos, letter in enumerate(word):
        if isinstance(letter, bool) or not isinstance(letter, int) or not 1 <= letter <= n:
            raise UsageError(f"{where}[{pos}]: letter {letter!r} outside 1..{n}")
    return word


def _reduce(a1, b1, a2, b2):
    """Reduced (alpha, beta) of S_a1 S_b1^* S_a2 S_b2^*, or None when the product is zero."""
    if len(a2) >= len(b1):
        if a2[:len(b1)] == b1:
            return a1 + a2[len(b1):], b2
        return None
    if b1[:len(a2)] == a2:
        return a1, b2 + b1[len(a2):]
    return None


def reduce_word_product(t1, t2):
    """
    Multiply two terms using S_i^* S_j = delta_ij.

    Returns the reduced Term, or None when the product vanishes.
    """
    if t1.n != t2.n:
        raise UsageError(f"cannot multiply terms of O_{t1.n} and O_{t2.n}")
    key = _reduce(t1.alpha, t1.beta, t2.alpha, t2.beta)
    if key is None:
        return None
    return Term(t1.n, t1.coeff * t2.coeff, key[0], key[1])


class AlgebraElement:
    """
    Immutable finite linear combination of words S_alpha S_beta^* in O_n.

    Coefficients with modulus <= eps are dropped on construction; keys are
    unique. Use the module functions (mul, phi, raise_to_profile, ...) or the
    arithmetic operators.
    """
    __slots__ = ("n", "_terms")

    def __init__(self, n, terms=None, eps=None):
        if isinstance(n, bool) or not isinstance(n, int) or n < 2:
            raise UsageError(f"n must be an integer >= 2, got {n!r}")
        merged = defaultdict(complex)
        for idx, ((alpha, beta), coeff) in enumerate((terms or {}).items()):
            alpha = check_word(n, alpha, f"terms[{idx}].alpha")
            beta = check_word(n, beta, f"terms[{idx}].beta")
            merged[(alpha, beta)] += complex(coeff)
        self.n = n
        self._terms = _canonical(merged, resolve_eps(eps))

    @classmethod
    def _build(cls, n, merged, eps=None):
        # Trusted constructor: keys are already valid words.
        obj = object.__new__(cls)
        obj.n = n
        obj._terms = _canonical(merged, resolve_eps(eps))
        return obj

    # --- constructors ---

    @classmethod
    def zero(cls, n):
        return cls._build(n, {})

    @classmethod
    def identity(cls, n):
        return cls._build(n, {((), ()): 1.0})

    @classmethod
    def word(cls, n, alpha, beta=(), coeff=1.0):
        return cls(n, {(tuple(alpha), tuple(beta)): coeff})

    @classmethod
    def generator(cls, n, i):
        return cls.word(n, (i,), ())

    @classmethod
    def projection(cls, n, alpha):
        return cls.word(n, alpha, alpha)

    # --- inspection ---

    @property
    def coefficients(self):
        return MappingProxyType(self._terms)

    @property
    def terms(self):
        return [Term(self.n, c, a, b) for (a, b), c in sorted(self._terms.items(), key=_term_order)]

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self.terms)

    def degrees(self):
        return sorted({len(a) - len(b) for a, b in self._terms})

    def is_gauge_invariant(self):
        return all(len(a) == len(b) for a, b in self._terms)

    @property
    def level(self):
        """Smallest k with the element in F_n^k, or None if it has nonzero gauge degree."""
        if not self.is_gauge_invariant():
            return None
        return max((len(a) for a, _ in self._terms), default=0)

    def max_length(self):
        return max((max(len(a), len(b)) for a, b in self._terms), default=0)

    # --- arithmetic ---

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return add(self, other)

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return add(self, scale(other, -1.0))

    def __neg__(self):
        return scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return mul(self, other)
        if isinstance(other, (int, float, complex)):
            return scale(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return scale(self, other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex)):
            return scale(self, 1.0 / other)
        return NotImplemented

    def adjoint(self):
        return adjoint(self)

    def equals(self, other, eps=None):
        return equals_within(self, other, eps)

    def is_zero(self, eps=None):
        return equals_within(self, AlgebraElement.zero(self.n), eps)

    def compressed(self, tol=COMPRESS_TOL):
        """
        Merge complete families {S_aj S_bj^*: j=1..n} with equal coefficients
        into S_a S_b^*, repeatedly. The value of the element is unchanged.
        """
        terms = dict(self._terms)
        changed = True
        while changed:
            changed = False
            groups = defaultdict(dict)
            for (a, b), c in terms.items():
                if a and b and a[-1] == b[-1]:
                    groups[(a[:-1], b[:-1])][a[-1]] = c
            for parent, family in groups.items():
                if len(family) != self.n or parent in terms:
                    continue
                values = list(family.values())
                if max(abs(c - values[0]) for c in values) > tol * max(1.0, abs(values[0])):
                    continue
                for j in family:
                    del terms[(parent[0] + (j,), parent[1] + (j,))]
                terms[parent] = sum(values) / self.n
                changed = True
        return AlgebraElement._build(self.n, terms)

    def __repr__(self):
        if not self._terms:
            return f"AlgebraElement(n={self.n}, 0)"
        shown = " + ".join(_format_term(t) for t in self.terms[:8])
        more = f" + ... ({len(self._terms)} terms)" if len(self._terms) > 8 else ""
        return f"AlgebraElement(n={self.n}, {shown}{more})"


def _canonical(merged, eps):
    terms = {key: c for key, c in merged.items() if abs(c) > eps}
    check_terms(len(terms))
    return terms


def _term_order(item):
    (a, b), _ = item
    return (len(a) - len(b), len(b), a, b)


def _format_term(t):
    c = t.coeff
    coeff = f"{c.real:.6g}" if abs(c.imag) < 1e-15 else f"({c.real:.6g}{c.imag:+.6g}j)"
    alpha = "".join(map(str, t.alpha)) or "0"
    beta = "".join(map(str, t.beta)) or "0"
    return f"{coeff}*S[{alpha}]S[{beta}]*"


def _same_n(x, y):
    if x.n != y.n:
        raise UsageError(f"elements live in different algebras: O_{x.n} and O_{y.n}")


# --- ring operations ---

def add(x, y):
    _same_n(x, y)
    acc = defaultdict(complex, x._terms)
    for key, c in y._terms.items():
        acc[key] += c
    return AlgebraElement._build(x.n, acc)


def scale(x, c):
    return AlgebraElement._build(x.n, {key: c * v for key, v in x._terms.items()})


def mul(x, y):
    """Product, reducing each pair of words with the Cuntz relations."""
    _same_n(x, y)
    acc = defaultdict(complex)
    for (a1, b1), c1 in x._terms.items():
        for (a2, b2), c2 in y._terms.items():
            key = _reduce(a1, b1, a2, b2)
            if key is not None:
                acc[key] += c1 * c2
    return AlgebraElement._build(x.n, acc)


def adjoint(x):
    return AlgebraElement._build(x.n, {(b, a): c.conjugate() for (a, b), c in x._terms.items()})


def linear_combination(n, pairs):
    """sum of c * x over (c, x) pairs."""
    acc = defaultdict(complex)
    for c, x in pairs:
        for key, v in x._terms.items():
            acc[key] += c * v
    return AlgebraElement._build(n, acc)


# --- length profiles ---

def beta_profile(x):
    """Per gauge degree, the longest beta among the terms."""
    profile = {}
    for a, b in x._terms:
        d = len(a) - len(b)
        profile[d] = max(profile.get(d, 0), len(b))
    return profile


def common_profile(*elements):
    profile = {}
    for x in elements:
        for d, m in beta_profile(x).items():
            profile[d] = max(profile.get(d, 0), m)
    return profile


def _raised(x, profile):
    acc = defaultdict(complex)
    for (a, b), c in x._terms.items():
        target = profile.get(len(a) - len(b), len(b))
        extra = target - len(b)
        if extra < 0:
            raise UsageError(f"cannot lower term S{list(a)}S{list(b)}* to |beta|={target}")
        if extra == 0:
            acc[(a, b)] += c
            continue
        check_terms(len(acc) + x.n ** extra, "raised element")
        for mu in words(x.n, extra):
            acc[(a + mu, b + mu)] += c
    return acc


def raise_to_profile(x, profile):
    """
    Rewrite x so that every term of gauge degree d has |beta| = profile[d].

    Degrees missing from `profile` keep their terms as they are.
    """
    return AlgebraElement._build(x.n, _raised(x, profile))


def max_difference(x, y):
    """Largest coefficient difference after aligning x and y to a common profile."""
    _same_n(x, y)
    profile = common_profile(x, y)
    rx = _raised(x, profile)
    ry = _raised(y, profile)
    return max((abs(rx.get(key, 0) - ry.get(key, 0)) for key in rx.keys() | ry.keys()), default=0.0)


def equals_within(x, y, eps=None):
    return max_difference(x, y) <= resolve_eps(eps)


# --- shift, towers, gauge grading ---

def phi(x, power=1):
    """The canonical shift phi(x) = sum_i S_i x S_i^*, applied `power` times."""
    if power < 0:
        raise UsageError(f"phi power must be >= 0, got {power}")
    if power == 0:
        return x
    check_terms(len(x) * x.n ** power, "shifted element")
    acc = {}
    for mu in words(x.n, power):
        for (a, b), c in x._terms.items():
            acc[(mu + a, mu + b)] = c
    return AlgebraElement._build(x.n, acc)


def u_tower(u, k):
    """u_k = u phi(u) ... phi^(k-1)(u); u_1 = u."""
    if k < 1:
        raise UsageError(f"tower length must be >= 1, got {k}")
    result = u
    for j in range(1, k):
        result = mul(result, phi(u, j))
    return result


def is_unitary_element(u, eps=None):
    """Word-level unitarity: u u^* = u^* u = 1 (works for mixed gauge degrees)."""
    one = AlgebraElement.identity(u.n)
    ustar = adjoint(u)
    return equals_within(mul(u, ustar), one, eps) and equals_within(mul(ustar, u), one, eps)


class Tower(NamedTuple):
    element: AlgebraElement
    k: int
    unitary: bool


def tower_report(u, k, eps=None):
    """u_tower plus a unitarity flag; the tower is computed either way."""
    unitary = is_unitary_element(u, eps)
    if not unitary:
        logging.warning(f"u_tower: input with {len(u)} terms is not unitary within eps={resolve_eps(eps)}")
    return Tower(u_tower(u, k), k, unitary)


@dataclass(frozen=True)
class GaugeDecomposition:
    n: int
    components: dict

    @property
    def degrees(self):
        return sorted(self.components)

    def component(self, d):
        return self.components.get(d, AlgebraElement.zero(self.n))

    def total(self):
        result = AlgebraElement.zero(self.n)
        for d in self.degrees:
            result = add(result, self.components[d])
        return result


def gauge_decompose(x):
    """Split x into its spectral components: degree |alpha| - |beta| of each term."""
    parts = defaultdict(dict)
    for (a, b), c in x._terms.items():
        parts[len(a) - len(b)][(a, b)] = c
    return GaugeDecomposition(x.n, {d: AlgebraElement._build(x.n, t) for d, t in sorted(parts.items())})

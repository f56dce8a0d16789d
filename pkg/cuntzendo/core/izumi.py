"""
Endomorphisms of O_n built from a finite abelian group G of order n.

Group elements index the generators: the elements of G, enumerated
lexicographically with the identity first, become the letters 1..n.
"""
import cmath
import itertools
import logging
import math
from dataclasses import dataclass, field

from cuntzendo.core.algebra import AlgebraElement, max_difference
from cuntzendo.core.endomorphism import PermutationMap, compose_endos, lambda_apply, unitary_of_endo
from cuntzendo.core.errors import ParseError, ResourceError, UsageError
from cuntzendo.core.masa import decide_diagonal_invariance
from cuntzendo.core.matrix import is_unitary
from cuntzendo.core.settings import current, resolve_eps


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Z_m1 x ... x Z_mr with the bracket <g, h> = prod_j exp(2 pi i g_j h_j / m_j)."""
    cyclic_orders: tuple

    def __post_init__(self):
        orders = tuple(self.cyclic_orders)
        object.__setattr__(self, "cyclic_orders", orders)
        if not orders or any(isinstance(m, bool) or not isinstance(m, int) or m < 1 for m in orders):
            raise UsageError(f"cyclic orders must be a non-empty list of integers >= 1, got {list(orders)}")
        if self.n < 2:
            raise UsageError("the group must have at least two elements")
        cap = current().max_group_order
        if self.n > cap:
            raise ResourceError(f"|G| = {self.n} is above the cap of {cap}")

    @classmethod
    def parse(cls, spec):
        """'2' is Z_2, '2,2' is Z_2 x Z_2."""
        try:
            orders = tuple(int(part) for part in str(spec).split(","))
        except ValueError:
            raise ParseError(f"group spec {spec!r}: expected comma separated cyclic orders such as '2,2'")
        return cls(orders)

    @property
    def n(self):
        return math.prod(self.cyclic_orders)

    @property
    def spec(self):
        return ",".join(map(str, self.cyclic_orders))

    @property
    def identity(self):
        return tuple(0 for _ in self.cyclic_orders)

    def elements(self):
        return list(itertools.product(*(range(m) for m in self.cyclic_orders)))

    def letter(self, g):
        idx = 0
        for component, m in zip(self._reduce(g), self.cyclic_orders):
            idx = idx * m + component
        return idx + 1

    def element(self, letter):
        return self.elements()[letter - 1]

    def add(self, g, h):
        return tuple((a + b) % m for a, b, m in zip(g, h, self.cyclic_orders))

    def neg(self, g):
        return tuple((-a) % m for a, m in zip(g, self.cyclic_orders))

    def sub(self, g, h):
        return self.add(g, self.neg(h))

    def bracket(self, g, h):
        phase = sum(a * b / m for a, b, m in zip(self._reduce(g), self._reduce(h), self.cyclic_orders))
        return cmath.exp(2j * math.pi * phase)

    def letter_table(self):
        return [{"letter": self.letter(g), "element": list(g)} for g in self.elements()]

    def _reduce(self, g):
        g = tuple(g)
        if len(g) != len(self.cyclic_orders):
            raise UsageError(f"element {list(g)} does not match cyclic orders {list(self.cyclic_orders)}")
        return tuple(a % m for a, m in zip(g, self.cyclic_orders))


def bracket(group, g, h):
    return group.bracket(g, h)


def u_of(group, g):
    """U(g) = sum_h <g, h> P_h."""
    return AlgebraElement(group.n, {((group.letter(h),), (group.letter(h),)): group.bracket(g, h)
                                    for h in group.elements()})


def izumi_images(group):
    """lambda(S_g) = n^(-1/2) sum_h <g, h> S_h U(g)^*, for g in letter order."""
    root = math.sqrt(group.n)
    images = []
    for g in group.elements():
        terms = {}
        for h, a in itertools.product(group.elements(), repeat=2):
            terms[((group.letter(h), group.letter(a)), (group.letter(a),))] = group.bracket(g, group.sub(h, a)) / root
        images.append(AlgebraElement(group.n, terms))
    return images


def izumi_unitary(group):
    """v = n^(-1/2) sum_{g,h,l} <g, h - l> S_h S_l S_l^* S_g^*, a unitary in F_n^2."""
    root = math.sqrt(group.n)
    terms = {}
    for g, h, l in itertools.product(group.elements(), repeat=3):
        key = ((group.letter(h), group.letter(l)), (group.letter(g), group.letter(l)))
        terms[key] = group.bracket(g, group.sub(h, l)) / root
    return AlgebraElement(group.n, terms)


def izumi_beta(group):
    """The level-one unitary of beta(S_h) = n^(-1/2) sum_a <h, a> S_a."""
    root = math.sqrt(group.n)
    return AlgebraElement(group.n, {((group.letter(a),), (group.letter(h),)): group.bracket(h, a) / root
                                    for h, a in itertools.product(group.elements(), repeat=2)})


def izumi_prime_unitary(group):
    """Unitary of lambda o beta: sum_{h,b} S_b S_(h+b) S_(h+b)^* S_h^*."""
    terms = {}
    for h, b in itertools.product(group.elements(), repeat=2):
        hb = group.letter(group.add(h, b))
        terms[((group.letter(b), hb), (group.letter(h), hb))] = 1.0
    return AlgebraElement(group.n, terms)


def izumi_square_unitary(group):
    """Unitary of lambda^2: sum_{g,h} S_g S_(h+g) S_g^* S_h^*."""
    terms = {}
    for g, h in itertools.product(group.elements(), repeat=2):
        terms[((group.letter(g), group.letter(group.add(h, g))), (group.letter(h), group.letter(g)))] = 1.0
    return AlgebraElement(group.n, terms)


@dataclass
class IdentityCheck:
    name: str
    holds: bool
    residual: float


@dataclass
class IzumiReport:
    group: str
    n: int
    letters: list
    checks: list = field(default_factory=list)

    @property
    def all_hold(self):
        return all(c.holds for c in self.checks)

    def failed(self):
        return [c for c in self.checks if not c.holds]


def verify_izumi_identities(group, eps=None):
    """
    Check the closed forms attached to G and report each identity with its residual.

    Nothing is raised when an identity fails; callers inspect `all_hold`.
    """
    eps = resolve_eps(eps)
    n = group.n
    report = IzumiReport(group.spec, n, group.letter_table())

    def record(name, residual, extra=True):
        holds = bool(residual <= eps and extra)
        report.checks.append(IdentityCheck(name, holds, float(residual)))
        if not holds:
            logging.warning(f"izumi {group.spec}: identity {name} fails, residual {residual:.3g}")

    v = izumi_unitary(group)
    record("unitary", 0.0 if is_unitary(v, 2, eps) else 1.0)

    images = izumi_images(group)
    record("generator-images", max_difference(unitary_of_endo(images, eps), v))

    residual = 0.0
    for g in group.elements():
        expected = AlgebraElement(n, {((group.letter(k),), (group.letter(group.add(g, k)),)): 1.0
                                      for k in group.elements()})
        residual = max(residual, max_difference(lambda_apply(v, u_of(group, g)), expected))
    record("lambda-of-U", residual)

    e = (group.letter(group.identity),)
    flat = AlgebraElement(n, {((group.letter(h),), (group.letter(k),)): 1.0 / n
                              for h, k in itertools.product(group.elements(), repeat=2)})
    record("lambda-of-identity-projection", max_difference(lambda_apply(v, AlgebraElement.projection(n, e)), flat))

    residual = 0.0
    for g in group.elements():
        gen = AlgebraElement.generator(n, group.letter(g))
        expected = AlgebraElement(n, {((group.letter(k), group.letter(group.add(g, k))), (group.letter(k),)): 1.0
                                      for k in group.elements()})
        residual = max(residual, max_difference(lambda_apply(v, lambda_apply(v, gen)), expected))
    record("lambda-square-images", residual)

    square = izumi_square_unitary(group)
    record("square-unitary", max_difference(compose_endos(v, v), square))

    prime = compose_endos(v, izumi_beta(group))
    perm = PermutationMap.from_unitary(prime, 2, eps)
    record("prime-permutation", max_difference(prime, izumi_prime_unitary(group)), perm is not None)

    decision = decide_diagonal_invariance(v, 2, eps)
    record("diagonal-not-preserved", 0.0, not decision.preserves_diagonal)
    return report

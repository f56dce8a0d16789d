import contextlib
import contextvars
import dataclasses
from dataclasses import dataclass

from cuntzendo.core.errors import ResourceError


@dataclass(frozen=True)
class Settings:
    """
    Tolerances and size caps shared by every computation.

    Attributes:
        eps: global zero tolerance for coefficients and membership tests.
        max_level: dense matrices are allowed while n**k <= 2**max_level.
        max_terms: abort when an element grows beyond this many terms.
        seed: seed for every randomized path (Weyl spot checks, samples).
        weyl_samples: number of random unitaries in the Weyl cross-check.
        max_group_order: largest |G| accepted by the Izumi construction.
        induced_guard: largest k for the exhaustive Sym(k) search.
    """
    eps: float = 1e-9
    max_level: int = 12
    max_terms: int = 1_000_000
    seed: int = 0
    weyl_samples: int = 10
    max_group_order: int = 16
    induced_guard: int = 10

    def replace(self, **changes):
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes)


_current = contextvars.ContextVar("cuntzendo_settings", default=Settings())


def current():
    return _current.get()


@contextlib.contextmanager
def using(settings):
    """Install `settings` for the duration of the block (context-local)."""
    token = _current.set(settings)
    try:
        yield settings
    finally:
        _current.reset(token)


def resolve_eps(eps):
    return current().eps if eps is None else eps


def check_terms(count, what="element"):
    cap = current().max_terms
    if count > cap:
        raise ResourceError(f"{what} has {count} terms, above the cap of {cap} (raise --max-terms)")


def check_dimension(n, k):
    cap = current().max_level
    if n ** k > 2 ** cap:
        raise ResourceError(f"level {k} for n={n} needs {n ** k}x{n ** k} matrices, above the cap 2^{cap} (raise --max-level)")

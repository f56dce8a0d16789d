import logging
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple, Optional

from .core import settings as settings_mod
from .core.algebra import adjoint, gauge_decompose, is_unitary_element
from .core.endomorphism import PermutationMap, compose_endos, detect_induced, lambda_apply, weyl_commutation_test
from .core.errors import DomainError
from .core.izumi import (FiniteAbelianGroup, izumi_beta, izumi_prime_unitary, izumi_square_unitary, izumi_unitary,
                         verify_izumi_identities)
from .core.masa import (DecisionReport, ad_normalizer_necessary, decide_diagonal_invariance, is_diagonal,
                        oracle_report, restrict_to_diagonal, standard_masa_invariance)
from .core.matrix import element_level, is_monomial, is_unitary
from .core.results_processor import (analysis_to_dict, decision_to_dict, print_ascii, print_csv, print_json,
                                     scan_to_dict)
from .utils import sampling


class ScanRow(NamedTuple):
    index: int
    params: dict
    verdict: bool
    report: Optional[DecisionReport]


class EndoCalc:
    """
    Runs the analyses on one unitary (or element) under fixed settings.

    Every public method evaluates inside `settings.using(self.settings)`, so the
    tolerances stay put even when scans fan out to worker threads.
    """
    def __init__(self, settings=None):
        self.settings = settings or settings_mod.Settings()
        self.results = None
        self.rows = None

    def _run(self, fn, *args, **kwargs):
        with settings_mod.using(self.settings):
            return fn(*args, **kwargs)

    # --- analyze ---

    def analyze(self, x):
        self.results = self._run(self._analyze, x)
        return self.results

    def _analyze(self, x):
        eps = self.settings.eps
        core = x.is_gauge_invariant()
        results = {
            'n': x.n,
            'terms': len(x),
            'gauge': gauge_decompose(x).degrees,
            'level': x.level,
            'unitary': None,
            'diagonal': is_diagonal(x, eps),
            'monomial': None,
            'permutation': None,
            'induced': None,
            'weyl': None,
        }
        if not core:
            results['unitary'] = is_unitary_element(x, eps)
            return analysis_to_dict(results)
        k = element_level(x)
        unitary = is_unitary(x, k, eps)
        results['unitary'] = unitary
        if not unitary:
            return analysis_to_dict(results)
        results['monomial'] = is_monomial(x, k, eps)
        perm = PermutationMap.from_unitary(x, k, eps)
        results['permutation'] = perm
        if perm is not None and k <= self.settings.induced_guard:
            results['induced'] = detect_induced(perm)
        if k <= self.settings.induced_guard:
            weyl = weyl_commutation_test(x, k, eps)
            results['weyl'] = weyl._asdict()
        return analysis_to_dict(results)

    # --- decide ---

    def decide(self, w, k=None, oracle=False):
        """Decision report, plus the oracle report when asked for."""
        def run():
            report = decide_diagonal_invariance(w, k)
            check = None
            if oracle:
                check = oracle_report(w, report.k, report.R + 2)
                if check.preserves_diagonal != report.preserves_diagonal:
                    logging.warning(f"decide: oracle at depth {report.R + 2} disagrees with the iteration")
            return report, check

        report, check = self._run(run)
        self.results = decision_to_dict(report)
        if check is not None:
            self.results['oracle'] = decision_to_dict(check)
            self.results['oracle_agrees'] = check.preserves_diagonal == report.preserves_diagonal
        return report, check

    # --- scans ---

    def scan(self, u, family=None, steps=101, thetas=(0.0,), z=None, depth=3, workers=1):
        """
        Evaluate every grid point of a Bogolyubov family (or the single z given).

        Core unitaries get the lambda_u invariance decision; unitaries with
        mixed gauge degrees get the finite-depth normalizer test for Ad u.
        """
        if z is not None:
            points = [({'z': 'file'}, z)]
        else:
            points = list(sampling.family(family, steps, thetas))
        core = u.is_gauge_invariant()
        settings = self.settings

        def evaluate(item):
            index, (params, zpoint) = item
            with settings_mod.using(settings):
                if core:
                    report = standard_masa_invariance(u, zpoint)
                    return ScanRow(index, params, report.preserves_diagonal, report)
                check = ad_normalizer_necessary(lambda_apply(adjoint(zpoint), u), depth)
                return ScanRow(index, params, check.normalizes, None)

        logging.info(f"scan: {len(points)} grid points, {workers} worker(s)")
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(evaluate, enumerate(points)))
        else:
            rows = [evaluate(item) for item in enumerate(points)]
        self.rows = rows
        meta = {'family': family if z is None else 'z-file', 'steps': steps if z is None else 1,
                'mode': 'lambda-invariance' if core else 'ad-normalizer', 'eps': settings.eps,
                'seed': settings.seed}
        if not core:
            meta['depth'] = depth
        self.results = scan_to_dict(rows, meta)
        return rows

    # --- compose, restrict, izumi ---

    def compose(self, u, w):
        return self._run(compose_endos, u, w)

    def restrict(self, w, k=None, depth=2):
        return self._run(restrict_to_diagonal, w, k, depth)

    def izumi(self, group_spec):
        """The four Izumi unitaries for the group plus the identity report."""
        def run():
            group = FiniteAbelianGroup.parse(group_spec)
            elements = {
                'v_lambda': izumi_unitary(group),
                'beta': izumi_beta(group),
                'v_lambda_prime': izumi_prime_unitary(group),
                'v_lambda_squared': izumi_square_unitary(group),
            }
            return elements, verify_izumi_identities(group)
        return self._run(run)

    # --- output ---

    def print_results_json(self):
        if self.results is None:
            raise DomainError("nothing has been computed yet")
        print_json(self.results)

    def print_results_ascii(self):
        print_ascii(self.results)

    def print_results_csv(self, out=None):
        print_csv(self.rows, out)

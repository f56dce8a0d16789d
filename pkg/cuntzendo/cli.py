#!/usr/bin/env python3

import argparse
import logging
import os
import sys

from cuntzendo.core.data_loader import dump_element, load_element, load_settings, save_element
from cuntzendo.core.errors import CuntzError, UsageError
from cuntzendo.core.settings import using
from cuntzendo.core.results_processor import cylinder_to_dict, dumps, izumi_to_dict, print_json
from cuntzendo.cuntzendo import EndoCalc
from cuntzendo.utils.sampling import FAMILIES

logging.basicConfig(level=logging.WARNING)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CHECK = 3


def build_parser():
    parser = argparse.ArgumentParser(prog="cuntzendo",
                                     description="Endomorphisms of the Cuntz algebra O_n and their invariant MASAs")
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help="More logging; repeat for debug output")
    parser.add_argument('--config', help="Settings file in TOML format")
    parser.add_argument('--eps', type=float, help="Zero tolerance (default 1e-9, or $CUNTZ_ENDO_EPS)")
    parser.add_argument('--max-level', type=int, help="Dense matrices allowed while n^k <= 2^max-level (default 12)")
    parser.add_argument('--max-terms', type=int, help="Largest element size in terms (default 1000000)")
    parser.add_argument('--seed', type=int, help="Seed for the randomized cross-checks (default 0)")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('analyze', help="Gauge degrees, level, unitarity and normalizer tests of an element")
    p.add_argument('element', help="Element file in JSON format")
    p.add_argument('--ascii', action='store_true', help="Plain listing instead of JSON")

    p = sub.add_parser('decide', help="Decide whether lambda_w preserves the diagonal")
    p.add_argument('element', help="Unitary element file in JSON format")
    p.add_argument('--k', type=int, help="Level of w (default: the smallest one)")
    p.add_argument('--oracle', action='store_true',
                   help="Cross-check against direct conjugation of cylinder projections")
    p.add_argument('--ascii', action='store_true', help="Plain listing instead of JSON")

    p = sub.add_parser('masa-scan', help="Test standard MASAs over a family of Bogolyubov unitaries")
    p.add_argument('element', help="Unitary element file in JSON format")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument('--family', choices=FAMILIES, help="Parametrized family of level-one unitaries z")
    source.add_argument('--z-file', help="A single level-one unitary z in JSON format")
    p.add_argument('--steps', type=int, default=101, help="Grid points per parameter (default 101)")
    p.add_argument('--theta', type=float, action='append',
                   help="Global phase for phased-su2; repeat for several (default 0)")
    p.add_argument('--depth', type=int, default=3,
                   help="Cylinder depth for unitaries outside the core (default 3)")
    p.add_argument('--workers', type=int, default=1, help="Evaluate grid points on this many threads")
    p.add_argument('--csv', action='store_true', help="Generate CSV output instead of JSON")
    p.add_argument('--csv-file', help="Also write the CSV table to this file")

    p = sub.add_parser('izumi', help="Build the unitaries attached to a finite abelian group")
    p.add_argument('--group', required=True, help="Cyclic orders, e.g. '2' or '2,2'")
    p.add_argument('--outdir', help="Directory for the element files and report.json")

    p = sub.add_parser('compose', help="Unitary of lambda_u o lambda_w")
    p.add_argument('u', help="Element file for u")
    p.add_argument('w', help="Element file for w")
    p.add_argument('--out', help="Write the result here instead of stdout")

    p = sub.add_parser('restrict', help="Block map of lambda_w on cylinder projections")
    p.add_argument('element', help="Unitary element file in JSON format")
    p.add_argument('--k', type=int, help="Level of w (default: the smallest one)")
    p.add_argument('--depth', type=int, default=2, help="Length of the cylinder words (default 2)")
    return parser


def cmd_analyze(calc, args):
    calc.analyze(load_element(args.element))
    if args.ascii:
        calc.print_results_ascii()
    else:
        calc.print_results_json()
    return EXIT_OK


def cmd_decide(calc, args):
    _, check = calc.decide(load_element(args.element), k=args.k, oracle=args.oracle)
    if args.ascii:
        calc.print_results_ascii()
    else:
        calc.print_results_json()
    if check is not None and not calc.results['oracle_agrees']:
        return EXIT_CHECK
    return EXIT_OK


def cmd_masa_scan(calc, args):
    u = load_element(args.element)
    z = load_element(args.z_file) if args.z_file else None
    calc.scan(u, family=args.family, steps=args.steps, thetas=tuple(args.theta or [0.0]), z=z,
              depth=args.depth, workers=args.workers)
    if args.csv_file:
        try:
            with open(args.csv_file, 'w', encoding='utf-8', newline='') as f:
                calc.print_results_csv(f)
        except OSError as e:
            raise UsageError(f"{args.csv_file}: {e.strerror}")
        logging.info(f"masa-scan: wrote {len(calc.rows)} rows to {args.csv_file}")
    if args.csv:
        calc.print_results_csv()
    else:
        calc.print_results_json()
    return EXIT_OK


def cmd_izumi(calc, args):
    elements, report = calc.izumi(args.group)
    results = izumi_to_dict(report)
    if args.outdir:
        os.makedirs(args.outdir, exist_ok=True)
        for name, x in elements.items():
            save_element(x, os.path.join(args.outdir, f"{name}.json"))
        with open(os.path.join(args.outdir, "report.json"), 'w', encoding='utf-8') as f:
            f.write(dumps(results) + "\n")
        logging.info(f"izumi: wrote {len(elements) + 1} files to {args.outdir}")
    print_json(results)
    return EXIT_OK if report.all_hold else EXIT_CHECK


def cmd_compose(calc, args):
    result = calc.compose(load_element(args.u), load_element(args.w))
    if args.out:
        save_element(result, args.out)
    else:
        print(dump_element(result))
    return EXIT_OK


def cmd_restrict(calc, args):
    cmap = calc.restrict(load_element(args.element), k=args.k, depth=args.depth)
    print_json(cylinder_to_dict(cmap))
    return EXIT_OK


COMMANDS = {
    'analyze': cmd_analyze,
    'decide': cmd_decide,
    'masa-scan': cmd_masa_scan,
    'izumi': cmd_izumi,
    'compose': cmd_compose,
    'restrict': cmd_restrict,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG if args.verbose > 1 else logging.INFO)

    try:
        settings = load_settings(args.config, eps=args.eps, max_level=args.max_level,
                                 max_terms=args.max_terms, seed=args.seed)
        calc = EndoCalc(settings)
        with using(settings):
            code = COMMANDS[args.command](calc, args)
    except CuntzError as e:
        logging.debug("input error", exc_info=True)
        print(f"cuntzendo {args.command}: {e}", file=sys.stderr)
        code = EXIT_INPUT
    sys.exit(code)


if __name__ == "__main__":
    main()

import csv
import json
import sys

from cuntzendo.core.data_loader import element_to_dict, permutation_to_dict


def decision_to_dict(report):
    return {
        'n': report.n,
        'k': report.k,
        'preserves_diagonal': report.preserves_diagonal,
        'R': report.R,
        'subspace_dims': list(report.subspace_dims),
        'witness': element_to_dict(report.witness) if report.witness is not None else None,
        'method': report.method,
        'eps': report.eps,
    }


def cylinder_to_dict(cmap):
    entries = []
    for alpha in sorted(cmap.entries):
        row = {'alpha': list(alpha), 'images': [list(g) for g in cmap.entries[alpha]]}
        if cmap.weights is not None:
            row['weights'] = [{'word': list(g), 'coeff': c} for g, c in sorted(cmap.weights[alpha].items())]
        entries.append(row)
    return {'depth': cmap.depth, 'level': cmap.level, 'binary': cmap.binary, 'entries': entries}


def izumi_to_dict(report):
    return {
        'group': report.group,
        'n': report.n,
        'letters': report.letters,
        'all_hold': report.all_hold,
        'checks': [{'name': c.name, 'holds': c.holds, 'residual': c.residual} for c in report.checks],
    }


def analysis_to_dict(analysis):
    d = dict(analysis)
    if d.get('permutation') is not None:
        d['permutation'] = permutation_to_dict(d['permutation'])
    if d.get('induced') is not None:
        d['induced'] = list(d['induced'].omega)
    return d


def scan_to_dict(rows, meta):
    return {
        **meta,
        'rows': [{'index': r.index, 'params': r.params, 'verdict': r.verdict,
                  'R': r.report.R if r.report is not None else None} for r in rows],
    }


def dumps(obj):
    """Deterministic JSON; floats keep their shortest round-trip repr."""
    return json.dumps(obj, indent=2, allow_nan=False)


def print_json(obj, out=None):
    out = out or sys.stdout
    out.write(dumps(obj) + "\n")


def print_ascii(results, out=None):
    """Flat key/value listing for the analyze and decide reports."""
    out = out or sys.stdout
    if results is None:
        print("No results available to print.", file=out)
        return
    width = max((len(str(k)) for k in results), default=0)
    for key, value in results.items():
        if isinstance(value, dict) and 'terms' in value:
            value = f"<element with {len(value['terms'])} terms>"
        print(f"{key:>{width}} : {value}", file=out)


def print_csv(rows, out=None):
    """One line per scan grid point, parameters first."""
    out = out or sys.stdout
    if not rows:
        print("No results available to print.", file=out)
        return
    names = list(rows[0].params)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(['index'] + names + ['verdict', 'R'])
    for r in rows:
        r_value = r.report.R if r.report is not None else ''
        writer.writerow([r.index] + [repr(r.params[k]) for k in names] + [str(r.verdict).lower(), r_value])

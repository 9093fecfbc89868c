# coding: utf-8

"""
Writes and reads the CSV and JSON result files.

Every CSV file has a fixed header, listed in the *_FIELDS constants, and
can be read back with read_csv() or one of its typed wrappers.  Floats are
written with repr() so that identical results give identical files.

"""

import csv
import json
import logging
import math
import os

import numpy as np


logger = logging.getLogger(__name__)


SERIES_FIELDS = ('n', 'delay_ms', 'cpd', 'pmf', 'violation')

SUMMARY_FIELDS = ('name', 'variant', 'mu1', 'method', 'd_ave', 'd_ave_littles', 'd_ave_ms',
                  'd_sd', 'd_sd_ms', 'p_off', 'p2_full', 'n_stop', 'tail', 'truncated',
                  'unimodal')

SWEEP_FIELDS = ('variant', 'index', 'mu1', 's1', 'd_ave', 'd_ave_littles', 'd_sd', 'p_off',
                'p2_full')

PMF_FIELDS = ('variant', 'mu1', 'n', 'pmf')

PMF_SUMMARY_FIELDS = ('variant', 'mu1', 'mode', 'tail_after_mode', 'tail_bound', 'total',
                      'unimodal')

SIMULATION_FIELDS = ('metric', 'point', 'low', 'high')

COMPARISON_FIELDS = ('metric', 'bound', 'analytic', 'sim_value', 'ci_low', 'ci_high', 'inside')


def _format(value):
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _parse(text):
    if text == '':
        return None
    if text in ('true', 'false'):
        return text == 'true'
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def plain(value):
    """Return value with numpy types replaced by JSON-compatible ones."""
    if isinstance(value, dict):
        return dict((str(key), plain(item)) for key, item in value.items())
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def _ensure_directory(path):
    directory = os.path.dirname(path)
    if directory and not os.path.isdir(directory):
        os.makedirs(directory)


def write_csv(path, fields, rows):
    """
    Write rows (dicts keyed by the given fields) to a CSV file.

    """
    _ensure_directory(path)
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_format(row.get(field)) for field in fields])
    logger.debug("wrote %s", path)
    return path


def read_csv(path, fields=None):
    """
    Return the rows of a CSV file as a list of dicts with typed values.

    Raises ValueError if fields is given and the header differs.

    """
    with open(path, newline='') as f:
        reader = csv.reader(f)
        header = tuple(next(reader))
        if fields is not None and header != tuple(fields):
            raise ValueError("%s: unexpected header %r" % (path, header))
        return [dict(zip(header, (_parse(cell) for cell in row))) for row in reader]


def read_series_csv(path):
    return read_csv(path, SERIES_FIELDS)


def read_summary_csv(path):
    return read_csv(path, SUMMARY_FIELDS)


def read_sweep_csv(path):
    return read_csv(path, SWEEP_FIELDS)


def read_pmf_csv(path):
    return read_csv(path, PMF_FIELDS)


def read_comparison_csv(path):
    return read_csv(path, COMPARISON_FIELDS)


def write_json(path, tree):
    _ensure_directory(path)
    with open(path, 'w') as f:
        json.dump(plain(tree), f, indent=2, sort_keys=True)
        f.write('\n')
    logger.debug("wrote %s", path)
    return path


def read_report_json(path):
    with open(path) as f:
        return json.load(f)


def series_rows(characteristics):
    """Return the per-bound rows (n, delay_ms, cpd, pmf, violation)."""
    slot_ms = characteristics.slot_ms
    return [{'n': n, 'delay_ms': n * slot_ms, 'cpd': cpd, 'pmf': pmf, 'violation': violation}
            for n, cpd, pmf, violation in zip(range(1, characteristics.n_stop + 1),
                                              characteristics.cpd, characteristics.pmf,
                                              characteristics.violation)]


def summary_row(characteristics, name, variant=None, mu1=None):
    row = characteristics.to_dict()
    row.update({'name': name, 'variant': variant, 'mu1': mu1,
                'method': characteristics.diagnostics.get('method')})
    return row


def simulation_rows(estimates):
    return [{'metric': name, 'point': e.point, 'low': e.low, 'high': e.high}
            for name, e in sorted(estimates.estimates.items())]


def comparison_rows(characteristics, estimates):
    """
    Return the analytic-versus-simulation rows of every estimated metric
    the analytic side also computes.

    """
    rows = []

    def add(metric, bound, analytic, estimate):
        rows.append({
            'metric': metric, 'bound': bound, 'analytic': analytic,
            'sim_value': estimate.point, 'ci_low': estimate.low, 'ci_high': estimate.high,
            'inside': estimate.low <= analytic <= estimate.high,
        })

    for n in estimates.bounds:
        add('violation', n, characteristics.violation_at(n), estimates.violation(n))
    add('d_ave', None, characteristics.d_ave, estimates['d_ave'])
    add('d_sd', None, characteristics.d_sd, estimates['d_sd'])
    add('p_off', None, characteristics.p_off, estimates['p_off'])
    add('p2_full', None, characteristics.p2_full, estimates['p2_full'])
    add('admitted_rate', None, characteristics.diagnostics['admitted_rate'],
        estimates['admitted_rate'])
    return rows

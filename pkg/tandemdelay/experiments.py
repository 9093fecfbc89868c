# coding: utf-8

"""
Runs the experiments a scenario describes and writes their result files.

  run()         analyze and/or simulate one scenario
  sweep()       evaluate the scenario over a grid of transmission rates
  pmf_series()  compute delay pmf curves for a few transmission rates

Sweep and pmf points are independent and are evaluated in a process pool
when more than one worker is requested; their rows keep grid order.

"""

import logging
import multiprocessing
import os

from tandemdelay import defaults
from tandemdelay import output
from tandemdelay.analyzer import Analyzer
from tandemdelay.common import ConfigurationError
from tandemdelay.delay import tail_mass_after_mode
from tandemdelay.models import geometric
from tandemdelay.simulator import SimConfig, simulate


logger = logging.getLogger(__name__)


class Mode(object):

    """Contains the valid values for run()'s mode."""

    analytic = 'analytic'
    simulate = 'simulate'
    both = 'both'

    @classmethod
    def values(cls):
        return (cls.analytic, cls.simulate, cls.both)


FORMATS = ('csv', 'json', 'both')


class RunReport(object):

    """The results of run() and the files it wrote."""

    def __init__(self, config, characteristics=None, estimates=None, paths=None):
        self.config = config
        self.characteristics = characteristics
        self.estimates = estimates
        self.paths = paths or []

    @property
    def converged(self):
        return self.estimates is None or self.estimates.converged

    def comparison(self):
        if self.characteristics is None or self.estimates is None:
            return []
        return output.comparison_rows(self.characteristics, self.estimates)

    def to_dict(self):
        tree = {'scenario': self.config.to_dict()}
        if self.characteristics is not None:
            c = self.characteristics
            tree['analytic'] = dict(c.to_dict(), violation=dict(
                (str(n), c.violation_at(n)) for n in self.config.bounds))
        if self.estimates is not None:
            tree['simulation'] = self.estimates.to_dict()
        if self.characteristics is not None and self.estimates is not None:
            tree['comparison'] = self.comparison()
        return tree


def _map(function, jobs, workers):
    if workers is None:
        workers = defaults.WORKERS
    if workers <= 1 or len(jobs) <= 1:
        return [function(job) for job in jobs]
    pool = multiprocessing.Pool(min(workers, len(jobs)))
    try:
        return pool.map(function, jobs)
    finally:
        pool.close()
        pool.join()


def _analyze(job):
    analyzer, config = job
    return analyzer.analyze(config)


def _writes(formats, kind):
    return formats in (kind, 'both')


def run(config, mode=Mode.analytic, out=None, formats='both', workers=None, analyzer=None):
    """
    Return the RunReport of a scenario, writing result files to out.

    Arguments:

      config: a ScenarioConfig.

      mode: 'analytic', 'simulate' or 'both'.

      out: the output directory, or None to write nothing.

      formats: 'csv', 'json' or 'both'.

      workers: the number of processes the simulation may use.

      analyzer: the Analyzer to use.  Defaults to one following the
        scenario's solver settings.

    """
    if mode not in Mode.values():
        raise ValueError("unknown mode: %r" % (mode, ))
    if formats not in FORMATS:
        raise ValueError("unknown format: %r" % (formats, ))
    if analyzer is None:
        analyzer = Analyzer()

    report = RunReport(config)
    if mode in (Mode.analytic, Mode.both):
        report.characteristics = analyzer.analyze(config)
    if mode in (Mode.simulate, Mode.both):
        report.estimates = simulate(SimConfig(config, workers=workers))

    if out is not None:
        report.paths = write_run(report, out, formats)
    return report


def write_run(report, out, formats='both'):
    """Write a RunReport's files and return their paths."""
    name = report.config.name
    paths = []
    if _writes(formats, 'json'):
        paths.append(output.write_json(os.path.join(out, '%s.json' % name), report.to_dict()))
    if _writes(formats, 'csv'):
        c = report.characteristics
        if c is not None:
            paths.append(output.write_csv(os.path.join(out, '%s_series.csv' % name),
                                          output.SERIES_FIELDS, output.series_rows(c)))
            paths.append(output.write_csv(os.path.join(out, '%s_summary.csv' % name),
                                          output.SUMMARY_FIELDS, [output.summary_row(c, name)]))
        if report.estimates is not None:
            paths.append(output.write_csv(os.path.join(out, '%s_simulation.csv' % name),
                                          output.SIMULATION_FIELDS,
                                          output.simulation_rows(report.estimates)))
        if c is not None and report.estimates is not None:
            paths.append(output.write_csv(os.path.join(out, '%s_comparison.csv' % name),
                                          output.COMPARISON_FIELDS, report.comparison()))
    return paths


def _variants(config):
    if config.sweep is not None and config.sweep.variants:
        return sorted(config.sweep.variants.items())
    return [(config.name, config.computation)]


def sweep(config, workers=None, analyzer=None):
    """
    Return the sweep rows of a scenario, one per variant and grid point.

    Each grid point replaces the transmission time by the order-1 DPh with
    S1 = s1 and each variant replaces the computation time.

    """
    if config.sweep is None:
        raise ConfigurationError("the scenario has no sweep section", path='sweep')
    if analyzer is None:
        analyzer = Analyzer()

    points = []
    jobs = []
    for variant, computation in _variants(config):
        for index, ((mu1, transmission), s1) in enumerate(zip(config.sweep.points(),
                                                              config.sweep.s1)):
            point = config.with_transmission(transmission).with_computation(
                computation, name='%s[%s,%d]' % (config.name, variant, index))
            points.append((variant, index, mu1, s1))
            jobs.append((analyzer, point))

    results = _map(_analyze, jobs, workers)

    rows = []
    for (variant, index, mu1, s1), c in zip(points, results):
        rows.append({'variant': variant, 'index': index, 'mu1': mu1, 's1': s1,
                     'd_ave': c.d_ave, 'd_ave_littles': c.d_ave_littles, 'd_sd': c.d_sd,
                     'p_off': c.p_off, 'p2_full': c.p2_full})
    logger.info("%s: swept %d points", config.name, len(rows))
    return rows


def pmf_series(config, mu1=None, workers=None, analyzer=None):
    """
    Return (rows, summaries) of the delay pmf curves of a scenario.

    Arguments:

      mu1: the transmission rates of the curves.  Defaults to the
        scenario's pmf section.

    The rows hold (variant, mu1, n, pmf); the summaries hold one record
    per curve with its mode, the mass beyond the mode, the tail bound (the
    delay met by a TAIL_QUANTILE share of the tasks), its total mass and
    whether it has a single peak.

    """
    if mu1 is None:
        if config.pmf is None:
            raise ConfigurationError("the scenario has no pmf section", path='pmf')
        mu1 = config.pmf
    if analyzer is None:
        analyzer = Analyzer()

    curves = []
    jobs = []
    for variant, computation in _variants(config):
        for rate in mu1:
            point = config.with_transmission(geometric(rate, name='transmission')).with_computation(
                computation, name='%s[%s,%g]' % (config.name, variant, rate))
            curves.append((variant, rate))
            jobs.append((analyzer, point))

    results = _map(_analyze, jobs, workers)

    rows = []
    summaries = []
    for (variant, rate), c in zip(curves, results):
        for n, value in enumerate(c.pmf, 1):
            rows.append({'variant': variant, 'mu1': rate, 'n': n, 'pmf': value})
        summaries.append({
            'variant': variant,
            'mu1': rate,
            'mode': int(c.pmf.argmax()) + 1,
            'tail_after_mode': tail_mass_after_mode(c.pmf),
            'tail_bound': c.quantile(defaults.TAIL_QUANTILE),
            'total': float(c.pmf.sum()),
            'unimodal': c.unimodal,
        })
    return rows, summaries


def write_sweep(rows, out, name):
    return output.write_csv(os.path.join(out, '%s_sweep.csv' % name), output.SWEEP_FIELDS, rows)


def write_pmf(rows, summaries, out, name):
    return [output.write_csv(os.path.join(out, '%s_pmf.csv' % name), output.PMF_FIELDS, rows),
            output.write_csv(os.path.join(out, '%s_pmf_summary.csv' % name),
                             output.PMF_SUMMARY_FIELDS, summaries)]

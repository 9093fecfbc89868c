# coding: utf-8

"""
Unit tests of experiments.py and output.py.

"""

import os
import shutil
import tempfile
import unittest
import warnings

import numpy as np

from tandemdelay import output
from tandemdelay.common import ConfigurationError, NotConvergedWarning
from tandemdelay.experiments import Mode, pmf_series, run, sweep, write_pmf, write_sweep
from tandemdelay.presets import PMF_MU1, SWEEP_MU1, VARIANT_HIGH_LOAD, VARIANT_LOW_LOAD
from tandemdelay.presets import get_preset
from tandemdelay.tests.common import toy_config


def quick_toy():
    return toy_config(simulation={'seed': 5, 'warmup': 500, 'segment_slots': 2000,
                                  'max_slots': 10000})


class RunTests(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def path(self, name):
        return os.path.join(self.directory, name)

    def test_analytic(self):
        report = run(toy_config(), out=self.directory)
        self.assertIsNone(report.estimates)
        self.assertTrue(report.converged)
        self.assertEqual(sorted(os.path.basename(p) for p in report.paths),
                         ['toy.json', 'toy_series.csv', 'toy_summary.csv'])

        series = output.read_series_csv(self.path('toy_series.csv'))
        c = report.characteristics
        self.assertEqual(len(series), c.n_stop)
        self.assertEqual(series[0]['n'], 1)
        self.assertEqual(series[4]['cpd'], float(c.cpd[4]))
        self.assertEqual(series[4]['delay_ms'], 5.0)

        summary = output.read_summary_csv(self.path('toy_summary.csv'))
        self.assertEqual(summary[0]['name'], 'toy')
        self.assertEqual(summary[0]['method'], 'direct')
        self.assertEqual(summary[0]['d_ave'], c.d_ave)
        self.assertIs(summary[0]['truncated'], False)

        tree = output.read_report_json(self.path('toy.json'))
        self.assertEqual(tree['scenario']['name'], 'toy')
        self.assertAlmostEqual(tree['analytic']['violation']['5'], c.violation_at(5))
        self.assertNotIn('simulation', tree)

    def test_both(self):
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', NotConvergedWarning)
            report = run(quick_toy(), mode=Mode.both, out=self.directory, formats='csv')
        names = sorted(os.path.basename(p) for p in report.paths)
        self.assertEqual(names, ['toy_comparison.csv', 'toy_series.csv',
                                 'toy_simulation.csv', 'toy_summary.csv'])
        rows = output.read_comparison_csv(self.path('toy_comparison.csv'))
        metrics = [row['metric'] for row in rows]
        self.assertEqual(metrics.count('violation'), 4)
        self.assertEqual(metrics[-5:], ['d_ave', 'd_sd', 'p_off', 'p2_full', 'admitted_rate'])
        for row in rows:
            self.assertIn(row['inside'], (True, False))
            self.assertLessEqual(row['ci_low'], row['sim_value'])

    def test_simulate__json(self):
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', NotConvergedWarning)
            report = run(quick_toy(), mode=Mode.simulate, out=self.directory, formats='json')
        self.assertIsNone(report.characteristics)
        tree = output.read_report_json(report.paths[0])
        self.assertEqual(tree['simulation']['segments'], report.estimates.segments)
        self.assertEqual(tree['simulation']['settings']['seed'], 5)

    def test_no_output(self):
        report = run(toy_config())
        self.assertEqual(report.paths, [])
        self.assertEqual(report.comparison(), [])

    def test_bad_arguments(self):
        self.assertRaises(ValueError, run, toy_config(), mode='exact')
        self.assertRaises(ValueError, run, toy_config(), formats='xml')


class OutputTests(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_csv(self):
        path = os.path.join(self.directory, 'nested', 'rows.csv')
        rows = [{'a': 1, 'b': 0.1, 'c': True}, {'a': 2, 'b': None, 'c': 'text'}]
        output.write_csv(path, ('a', 'b', 'c'), rows)
        self.assertEqual(output.read_csv(path), rows)

    def test_csv__header(self):
        path = os.path.join(self.directory, 'rows.csv')
        output.write_csv(path, ('a', ), [{'a': 1}])
        self.assertRaises(ValueError, output.read_csv, path, ('b', ))

    def test_plain(self):
        tree = output.plain({'x': np.arange(2), 1: np.float64(np.inf), 'y': np.bool_(True)})
        self.assertEqual(tree, {'x': [0, 1], '1': None, 'y': True})


class SweepTests(unittest.TestCase):

    """The transmission-rate sweep of both computation-time variants."""

    @classmethod
    def setUpClass(cls):
        cls.rows = sweep(get_preset('pmf-figs'))

    def variant(self, name):
        rows = [row for row in self.rows if row['variant'] == name]
        self.assertEqual([row['mu1'] for row in rows], SWEEP_MU1)
        return rows

    def test_rows(self):
        self.assertEqual(len(self.rows), 2 * len(SWEEP_MU1))
        self.assertEqual([row['index'] for row in self.variant(VARIANT_LOW_LOAD)],
                         list(range(len(SWEEP_MU1))))

    def test_average_delay_agreement(self):
        for row in self.rows:
            difference = abs(row['d_ave'] - row['d_ave_littles']) / row['d_ave_littles']
            self.assertLess(difference, 1e-6, row)

    def test_offloading_ratio(self):
        for name in (VARIANT_HIGH_LOAD, VARIANT_LOW_LOAD):
            p_off = [row['p_off'] for row in self.variant(name)]
            for before, after in zip(p_off, p_off[1:]):
                self.assertGreaterEqual(after, before - 1e-9, name)

    def test_interior_minimum(self):
        """Check that the average delay and its deviation dip when lambda > mu2."""
        rows = self.variant(VARIANT_HIGH_LOAD)
        for field in ('d_ave', 'd_sd'):
            values = [row[field] for row in rows]
            best = int(np.argmin(values))
            self.assertTrue(0 < best < len(values) - 1, field)
            self.assertLessEqual(rows[best]['mu1'], 0.4545, field)
            self.assertGreater(values[0], 1.01 * values[best], field)
            self.assertGreater(values[-1], 1.01 * values[best], field)

    def test_levels_off(self):
        """Check that the average delay falls and then flattens when lambda < mu2."""
        rows = self.variant(VARIANT_LOW_LOAD)
        values = [row['d_ave'] for row in rows]
        for before, after in zip(values, values[1:]):
            self.assertLessEqual(after, before + 1e-6)
        slopes = [(before['d_ave'] - after['d_ave']) / (after['mu1'] - before['mu1'])
                  for before, after in zip(rows, rows[1:])]
        self.assertLess(slopes[-1], 0.05 * slopes[0])

    def test_computation_buffer(self):
        rows = self.variant(VARIANT_HIGH_LOAD)
        self.assertGreater(rows[-1]['p2_full'], rows[0]['p2_full'])

    def test_write(self):
        directory = tempfile.mkdtemp()
        try:
            path = write_sweep(self.rows, directory, 'pmf-figs')
            self.assertEqual(output.read_sweep_csv(path), self.rows)
        finally:
            shutil.rmtree(directory)


class SweepErrorTests(unittest.TestCase):

    def test_no_sweep(self):
        with self.assertRaises(ConfigurationError) as context:
            sweep(toy_config())
        self.assertEqual(context.exception.path, 'sweep')

    def test_no_pmf(self):
        with self.assertRaises(ConfigurationError) as context:
            pmf_series(toy_config())
        self.assertEqual(context.exception.path, 'pmf')


class PmfSeriesTests(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.rows, cls.summaries = pmf_series(get_preset('pmf-figs'))

    def test_summaries(self):
        self.assertEqual(len(self.summaries), 2 * len(PMF_MU1))
        for summary in self.summaries:
            self.assertTrue(summary['unimodal'], summary)
            self.assertAlmostEqual(summary['total'], 1.0, places=9)
            self.assertGreaterEqual(summary['mode'], 2)
            self.assertGreater(summary['tail_bound'], summary['mode'])

    def tail_bounds(self, variant):
        summaries = [s for s in self.summaries if s['variant'] == variant]
        self.assertEqual([s['mu1'] for s in summaries], PMF_MU1)
        return [s['tail_bound'] for s in summaries]

    def test_tail__lambda_gt_mu2(self):
        """Check that the tail first gets lighter, then heavier."""
        slow, middle, fast = self.tail_bounds(VARIANT_HIGH_LOAD)
        self.assertLess(middle, slow)
        self.assertGreater(fast, middle)

    def test_tail__lambda_lt_mu2(self):
        """Check that the tail gets lighter as transmission speeds up."""
        slow, middle, fast = self.tail_bounds(VARIANT_LOW_LOAD)
        self.assertLess(middle, slow)
        self.assertLess(fast, middle)

    def test_rows(self):
        curve = [row for row in self.rows
                 if row['variant'] == VARIANT_LOW_LOAD and row['mu1'] == PMF_MU1[0]]
        self.assertEqual(curve[0]['n'], 1)
        self.assertEqual(curve[0]['pmf'], 0.0)
        self.assertAlmostEqual(sum(row['pmf'] for row in curve), 1.0, places=9)

    def test_explicit_rates(self):
        rows, summaries = pmf_series(toy_config(), mu1=[0.5, 0.9])
        self.assertEqual([s['variant'] for s in summaries], ['toy', 'toy'])
        self.assertGreater(summaries[0]['tail_after_mode'], 0.0)

    def test_write(self):
        directory = tempfile.mkdtemp()
        try:
            paths = write_pmf(self.rows, self.summaries, directory, 'pmf-figs')
            self.assertEqual(len(output.read_pmf_csv(paths[0])), len(self.rows))
            summaries = output.read_csv(paths[1], output.PMF_SUMMARY_FIELDS)
            self.assertEqual(summaries, self.summaries)
        finally:
            shutil.rmtree(directory)

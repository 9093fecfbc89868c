# coding: utf-8

"""
Unit tests of delay.py.

"""

import unittest
import warnings

import numpy as np

from tandemdelay.common import ConsistencyError, DegenerateModelError, TruncationWarning
from tandemdelay.delay import DelayCharacteristics, average_delay, delay_cpd
from tandemdelay.delay import delay_pmf_violation, delay_std, initial_tagged_distribution
from tandemdelay.delay import is_unimodal, prob_q2_full, tail_bounds, tail_mass_after_mode
from tandemdelay.kernel import build_blocks, build_hat, build_tilde
from tandemdelay.stationary import stationary
from tandemdelay.tests import oracle
from tandemdelay.tests.common import AssertArrayMixin, small_config, toy_config


class Pipeline(object):

    """The analytic steps up to the tagged-task distribution."""

    def __init__(self, config):
        self.config = config
        self.kernel = build_blocks(config.arrival, config.transmission, config.computation,
                                   config.vacation, config.layout())
        self.x = stationary(self.kernel)
        self.tagged = initial_tagged_distribution(self.x, build_hat(self.kernel),
                                                  config.arrival_rate)
        self.tilde = build_tilde(self.kernel)

    def cpd(self, **kwargs):
        return delay_cpd(self.tagged, self.tilde, **kwargs)


class TaggedDistributionTests(unittest.TestCase, AssertArrayMixin):

    def test_z(self):
        pipeline = Pipeline(small_config())
        layout = pipeline.kernel.layout
        z = pipeline.tagged.z
        self.assertAlmostEqual(z.sum(), 1.0, places=12)
        self.assertFalse(z[layout.level_slice(0)].any())
        self.assertTrue((z >= 0).all())

    def test_p_off(self):
        pipeline = Pipeline(small_config())
        tagged = pipeline.tagged
        self.assertGreater(tagged.p_off, 0.0)
        self.assertLessEqual(tagged.p_off, 1.0 + 1e-12)
        self.assertAlmostEqual(tagged.admitted, tagged.p_off * pipeline.config.arrival_rate,
                               places=12)

    def test_p_off__blocking(self):
        """Check that p_off equals 1 minus the arrivals lost at a full queue 1."""
        pipeline = Pipeline(toy_config())
        x = pipeline.x
        # With N1 = 1 an arrival is lost when queue 1 stays full: its task
        # is not transmitted in the slot.  The toy has one arrival phase.
        d1 = 0.4
        transmitting = sum(x.block(1, i2)[x.layout.part_offset(1, i2, 'serving'):].sum()
                           for i2 in range(x.layout.N2))
        full = sum(x.mass(1, i2) for i2 in range(x.layout.N2 + 1))
        lost = d1 * (full - transmitting * 0.5)
        self.assertAlmostEqual(pipeline.tagged.p_off, 1.0 - lost / 0.4, places=12)

    def test_degenerate(self):
        pipeline = Pipeline(toy_config())
        zero = np.zeros(pipeline.kernel.layout.total)
        self.assertRaises(DegenerateModelError, initial_tagged_distribution, zero,
                          build_hat(pipeline.kernel), 0.4)


class CpdTests(unittest.TestCase, AssertArrayMixin):

    def test_toy__reference(self):
        """Compare the first 20 CPD values with propagation on the full chain."""
        pipeline = Pipeline(toy_config())
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', TruncationWarning)
            result = pipeline.cpd(tail_eps=1e-300, n_max=20)
        expected = oracle.reference_cpd(pipeline.config, pipeline.x.x, 20)
        self.assertArrayClose(result.cpd, expected, atol=1e-10)

    def test_small__reference(self):
        pipeline = Pipeline(small_config())
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', TruncationWarning)
            result = pipeline.cpd(tail_eps=1e-300, n_max=30)
        expected = oracle.reference_cpd(pipeline.config, pipeline.x.x, 30)
        self.assertArrayClose(result.cpd, expected, atol=1e-10)

    def test_minimum_delay(self):
        """Check that no task leaves before two slots."""
        result = Pipeline(small_config()).cpd()
        self.assertEqual(result.cpd[0], 0.0)
        self.assertGreater(result.cpd[1], 0.0)

    def test_monotone_and_complete(self):
        result = Pipeline(small_config()).cpd(tail_eps=1e-10)
        self.assertTrue((np.diff(result.cpd) >= 0).all())
        self.assertLess(1.0 - result.cpd[-1], 1e-10)
        self.assertFalse(result.truncated)
        self.assertLess(result.mass_error, 1e-10)

    def test_truncation(self):
        pipeline = Pipeline(small_config())
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            result = pipeline.cpd(n_max=5)
        self.assertTrue(result.truncated)
        self.assertEqual(result.n_stop, 5)
        self.assertTrue(any(issubclass(w.category, TruncationWarning) for w in caught))

    def test_pmf_violation(self):
        pmf, violation = delay_pmf_violation([0.0, 0.25, 0.75, 1.0])
        self.assertArrayClose(pmf, [0.0, 0.25, 0.5, 0.25])
        self.assertArrayClose(violation, [1.0, 0.75, 0.25, 0.0])

    def test_pmf_violation__decreasing(self):
        self.assertRaises(ConsistencyError, delay_pmf_violation, [0.5, 0.25])


class AverageDelayTests(unittest.TestCase):

    def test_littles_law(self):
        """Check that the pmf mean equals the Little's-law mean."""
        pipeline = Pipeline(small_config())
        result = pipeline.cpd(tail_eps=1e-12)
        pmf, _ = delay_pmf_violation(result)
        d_pmf, d_littles = average_delay(pmf, pipeline.x, pipeline.config.arrival_rate,
                                         pipeline.tagged.p_off)
        self.assertLess(abs(d_pmf - d_littles) / d_littles, 1e-6)

    def test_disagreement(self):
        pipeline = Pipeline(small_config())
        pmf = np.zeros(500)
        pmf[-1] = 1.0
        args = (pmf, pipeline.x, pipeline.config.arrival_rate, pipeline.tagged.p_off)
        self.assertRaises(ConsistencyError, average_delay, *args)
        d_pmf, _ = average_delay(*args, check=False)
        self.assertEqual(d_pmf, 500.0)

    def test_std(self):
        pmf = np.array([0.0, 0.5, 0.5])
        self.assertAlmostEqual(delay_std(pmf, 2.5), 0.5)

    def test_prob_q2_full(self):
        pipeline = Pipeline(small_config())
        x = pipeline.x
        value = prob_q2_full(x)
        self.assertGreater(value, 0.0)
        layout = x.layout
        expected = sum(x.x[layout.block_slice(i1, layout.N2)].sum()
                       for i1 in range(layout.N1 + 1))
        self.assertAlmostEqual(value, expected, places=14)


class ShapeTests(unittest.TestCase):

    def test_unimodal(self):
        self.assertTrue(is_unimodal([0.0, 0.1, 0.4, 0.3, 0.2]))
        self.assertTrue(is_unimodal([0.5, 0.3, 0.2]))
        self.assertFalse(is_unimodal([0.1, 0.3, 0.1, 0.3, 0.2]))

    def test_unimodal__noise_floor(self):
        self.assertTrue(is_unimodal([0.1, 0.5, 0.2, 0.2 + 1e-14, 0.2], noise_floor=1e-12))

    def test_tail_mass_after_mode(self):
        self.assertAlmostEqual(tail_mass_after_mode([0.1, 0.5, 0.3, 0.1]), 0.4)

    def test_tail_bounds(self):
        violation = 0.5 ** np.arange(1, 31)
        record = tail_bounds(violation, violation[-1])
        self.assertEqual(record['n_stop'], 30)
        self.assertTrue(record['trusted'])
        self.assertAlmostEqual(record['decay_rate'], 0.5)

    def test_tail_bounds__untrusted(self):
        record = tail_bounds(np.array([0.9, 0.5, 0.1]), 0.1)
        self.assertFalse(record['trusted'])
        self.assertNotIn('decay_rate', record)


class DelayCharacteristicsTests(unittest.TestCase):

    def setUp(self):
        cpd = np.array([0.0, 0.25, 0.75, 1.0])
        pmf, violation = delay_pmf_violation(cpd)
        self.result = DelayCharacteristics(cpd, pmf, violation, 3.0, 3.0, 0.7, 0.9, 0.1,
                                           slot_ms=0.5)

    def test_cpd_at(self):
        result = self.result
        self.assertEqual(result.cpd_at(0), 0.0)
        self.assertEqual(result.cpd_at(2), 0.25)
        self.assertEqual(result.cpd_at(10), 1.0)
        self.assertEqual(result.violation_at(3), 0.25)

    def test_quantile(self):
        self.assertEqual(self.result.quantile(0.5), 3)
        self.assertEqual(self.result.quantile(0.25), 2)
        self.assertRaises(ValueError, self.result.quantile, 1.5)

    def test_quantile__beyond(self):
        result = DelayCharacteristics(np.array([0.0, 0.5]), np.array([0.0, 0.5]),
                                      np.array([1.0, 0.5]), 2.0, 2.0, 0.0, 1.0, 0.0)
        self.assertIsNone(result.quantile(0.9))

    def test_milliseconds(self):
        self.assertEqual(self.result.d_ave_ms, 1.5)
        self.assertAlmostEqual(self.result.d_sd_ms, 0.35)

    def test_to_dict(self):
        tree = self.result.to_dict()
        self.assertEqual(tree['n_stop'], 4)
        self.assertEqual(tree['p_off'], 0.9)
        self.assertTrue(tree['unimodal'])

# coding: utf-8

"""
Unit tests of config.py and presets.py.

"""

import os
import shutil
import tempfile
import unittest
import warnings

from tandemdelay import config as config_module
from tandemdelay.common import ConfigurationError, LayoutError, ModelValidationError
from tandemdelay.config import ScenarioConfig, SimulationSettings, Sweep, dumps_config
from tandemdelay.config import load_config, loads_config, parse_config, save_config
from tandemdelay.models import geometric
from tandemdelay.presets import PMF_MU1, SWEEP_MU1, SWEEP_S1, get_preset, get_preset_tree
from tandemdelay.presets import preset_names
from tandemdelay.tests.common import TOY_TREE, SetupDefaults, get_data_path, toy_config


class ParseConfigTests(unittest.TestCase):

    def assertConfigError(self, tree, path):
        with self.assertRaises(ConfigurationError) as context:
            parse_config(tree)
        self.assertEqual(context.exception.path, path)
        return context.exception

    def test_parse(self):
        config = toy_config()
        self.assertIsInstance(config, ScenarioConfig)
        self.assertEqual((config.n1, config.n2), (1, 2))
        self.assertEqual(config.name, 'toy')
        self.assertEqual(config.bounds, (2, 3, 5, 10))
        self.assertEqual(config.layout().total, 8)

    def test_defaults(self):
        tree = dict(TOY_TREE)
        del tree['name']
        del tree['bounds']
        config = parse_config(tree)
        self.assertEqual(config.name, 'scenario')
        self.assertEqual(config.slot_ms, 1.0)
        self.assertEqual(config.solver.method, 'direct')
        self.assertEqual(config.bounds, (10, 20, 30, 40, 50, 60))
        self.assertEqual(config.simulation.confidence, 0.95)
        self.assertIsNone(config.sweep)

    def test_missing_model_parameter(self):
        tree = dict(TOY_TREE)
        del tree['vacation']
        self.assertConfigError(tree, 'vacation')

    def test_missing_buffer(self):
        self.assertConfigError(dict(TOY_TREE, buffers={'n2': 3}), 'buffers.n1')

    def test_unknown_field(self):
        self.assertConfigError(dict(TOY_TREE, speed=3), 'speed')
        self.assertConfigError(dict(TOY_TREE, solver={'tolerance': 1}), 'solver.tolerance')

    def test_bad_entry(self):
        tree = dict(TOY_TREE, transmission={'alpha': [1.0], 't': [['x']]})
        error = self.assertConfigError(tree, 'transmission.t[0][0]')
        self.assertTrue(str(error).startswith('transmission.t[0][0]: '))

    def test_ragged_matrix(self):
        tree = dict(TOY_TREE, vacation={'alpha': [0.5, 0.5], 't': [[0.1, 0.1], [0.1]]})
        self.assertConfigError(tree, 'vacation.t[1]')

    def test_invalid_distribution(self):
        tree = dict(TOY_TREE, computation={'alpha': [1.0], 't': [[1.0]]})
        with self.assertRaises(ModelValidationError) as context:
            parse_config(tree)
        self.assertEqual(context.exception.path, 'computation.t')

    def test_buffers__order(self):
        with self.assertRaises(LayoutError):
            parse_config(dict(TOY_TREE, buffers={'n1': 3, 'n2': 3}))

    def test_solver_method(self):
        self.assertConfigError(dict(TOY_TREE, solver={'method': 'qr'}), 'solver.method')

    def test_simulation_policy(self):
        self.assertConfigError(dict(TOY_TREE, simulation={'policy': 'guess'}),
                               'simulation.policy')

    def test_simulation_confidence(self):
        self.assertConfigError(dict(TOY_TREE, simulation={'confidence': 1.0}),
                               'simulation.confidence')

    def test_scalar_matrices(self):
        """Check that order-1 distributions may be written as numbers."""
        tree = dict(TOY_TREE, transmission={'alpha': 1.0, 't': 0.5})
        self.assertEqual(parse_config(tree).transmission, geometric(0.5))

    def test_bounds(self):
        self.assertConfigError(dict(TOY_TREE, bounds=5), 'bounds')
        self.assertConfigError(dict(TOY_TREE, bounds=[5, 0]), 'bounds[1]')


class RoundTripTests(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_dumps_loads(self):
        config = get_preset('pmf-figs')
        self.assertEqual(loads_config(dumps_config(config)), config)

    def test_save_load(self):
        path = os.path.join(self.directory, 'toy.json')
        config = toy_config()
        save_config(config, path)
        self.assertEqual(load_config(path), config)

    def test_load_sample(self):
        config = load_config(get_data_path('sample.json'))
        self.assertEqual(config.name, 'sample')
        self.assertEqual(config.slot_ms, 0.5)
        self.assertEqual(config.solver.tail_eps, 1e-9)
        self.assertEqual(config.simulation.seed, 7)
        self.assertEqual(config.simulation.segment_slots, 20000)

    @unittest.skipIf(config_module.yaml is None, "PyYAML is not installed")
    def test_load_yaml(self):
        self.assertEqual(load_config(get_data_path('sample.yaml')),
                         load_config(get_data_path('sample.json')))

    def test_load_broken(self):
        with self.assertRaises(ConfigurationError) as context:
            load_config(get_data_path('broken.json'))
        self.assertEqual(context.exception.path, 'transmission.t[0][0]')

    def test_load_missing_file(self):
        self.assertRaises(ConfigurationError, load_config,
                          os.path.join(self.directory, 'missing.json'))

    def test_loads_invalid_json(self):
        self.assertRaises(ConfigurationError, loads_config, '{"buffers": ')


class ScenarioConfigTests(unittest.TestCase):

    def test_with_transmission(self):
        config = toy_config()
        faster = config.with_transmission(geometric(0.9, name='transmission'), name='fast')
        self.assertEqual(faster.name, 'fast')
        self.assertAlmostEqual(faster.transmission.rate, 0.9)
        self.assertAlmostEqual(config.transmission.rate, 0.5)

    def test_with_solver(self):
        config = toy_config().with_solver(method='mg', n_max=10)
        self.assertEqual((config.solver.method, config.solver.n_max), ('mg', 10))
        self.assertEqual(config.solver.tail_eps, 1e-10)
        self.assertRaises(ConfigurationError, toy_config().with_solver, 'qr')

    def test_with_simulation(self):
        config = toy_config().with_simulation(seed=3, max_slots=None)
        self.assertEqual(config.simulation.seed, 3)
        self.assertEqual(config.simulation.max_slots, 50000000)

    def test_with_bounds(self):
        self.assertEqual(toy_config().with_bounds([4, 8]).bounds, (4, 8))

    def test_arrival_rate(self):
        self.assertAlmostEqual(toy_config().arrival_rate, 0.4)

    def test_equality(self):
        self.assertEqual(toy_config(), toy_config())
        self.assertNotEqual(toy_config(), toy_config(name='other'))


class SimulationSettingsDefaultsTests(unittest.TestCase, SetupDefaults):

    def setUp(self):
        self.setup_defaults(SEED=99, WARMUP_SLOTS=5)

    def tearDown(self):
        self.teardown_defaults()

    def test_defaults_read_at_construction(self):
        settings = SimulationSettings()
        self.assertEqual((settings.seed, settings.warmup), (99, 5))


class SweepTests(unittest.TestCase):

    def test_points(self):
        sweep = Sweep(SWEEP_MU1, SWEEP_S1)
        points = sweep.points()
        self.assertEqual(len(points), 10)
        mu1, dph = points[3]
        self.assertEqual(mu1, 0.3571)
        self.assertAlmostEqual(dph.t[0, 0], 0.6429, places=12)

    def test_default_s1(self):
        self.assertAlmostEqual(Sweep([0.25]).s1[0], 0.75)

    def test_mismatch_warns(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            Sweep([0.3], [0.5])
        self.assertEqual(len(caught), 1)

    def test_length_mismatch(self):
        with self.assertRaises(ConfigurationError) as context:
            Sweep([0.3, 0.4], [0.7])
        self.assertEqual(context.exception.path, 'sweep.s1')


class PresetTests(unittest.TestCase):

    def test_names(self):
        self.assertEqual(preset_names(),
                         ['case1', 'case2', 'pmf-figs', 'sweep-high-load', 'sweep-low-load'])

    def test_all_parse(self):
        for name in preset_names():
            config = get_preset(name)
            self.assertEqual((config.n1, config.n2), (10, 15))
            self.assertAlmostEqual(config.arrival_rate, 0.5, places=2)

    def test_case_parameters(self):
        case1, case2 = get_preset('case1'), get_preset('case2')
        self.assertAlmostEqual(case1.transmission.rate, 0.3571, places=12)
        self.assertAlmostEqual(case2.transmission.rate, 0.8333, places=12)
        self.assertAlmostEqual(case1.computation.rate, 0.4545, places=12)
        self.assertEqual(case2.bounds[-1], 80)

    def test_pmf_figs(self):
        config = get_preset('pmf-figs')
        self.assertEqual(config.pmf, PMF_MU1)
        self.assertEqual(sorted(config.sweep.variants), ['lambda_gt_mu2', 'lambda_lt_mu2'])

    def test_tree_is_copy(self):
        tree = get_preset_tree('case1')
        tree['buffers']['n1'] = 1
        self.assertEqual(get_preset('case1').n1, 10)

    def test_unknown(self):
        with self.assertRaises(ConfigurationError) as context:
            get_preset('case3')
        self.assertEqual(context.exception.path, 'preset')

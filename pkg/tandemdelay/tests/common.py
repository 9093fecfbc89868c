# coding: utf-8

"""
Provides test-related code that can be used by all tests.

"""

import os
import unittest

import numpy as np

import tandemdelay
from tandemdelay import defaults
from tandemdelay.config import parse_config
from tandemdelay.presets import ARRIVAL


_TESTS_DIR = os.path.dirname(os.path.abspath(__file__))

DATA_DIR = os.path.join(_TESTS_DIR, 'data')  # i.e. 'tandemdelay/tests/data'.
PACKAGE_DIR = os.path.dirname(os.path.abspath(tandemdelay.__file__))
PROJECT_DIR = os.path.join(PACKAGE_DIR, '..')
# TEXT_DOCTEST_PATHS: the paths to text files (i.e. non-module files)
# containing doctests.  The paths should be relative to the project directory.
TEXT_DOCTEST_PATHS = ['README.md']

UNITTEST_FILE_PREFIX = "test_"

# Statistical checks that take minutes run only when this is set to 1.
SLOW_TESTS_VARIABLE = 'TANDEMDELAY_SLOW_TESTS'


def slow(test):
    """Skip a test unless the slow tests were requested."""
    return unittest.skipUnless(os.environ.get(SLOW_TESTS_VARIABLE) == '1',
                               "set %s=1 to run" % SLOW_TESTS_VARIABLE)(test)


def get_data_path(file_name=None):
    """Return the path to a file in the test data directory."""
    if file_name is None:
        file_name = ""
    return os.path.join(DATA_DIR, file_name)


# The smallest scenario: one phase everywhere, N1 = 1 and N2 = 2 give the
# 8-state layout.
TOY_TREE = {
    'name': 'toy',
    'buffers': {'n1': 1, 'n2': 2},
    'arrival': {'d0': [[0.6]], 'd1': [[0.4]]},
    'transmission': {'alpha': [1.0], 't': [[0.5]]},
    'computation': {'alpha': [1.0], 't': [[0.3]]},
    'vacation': {'alpha': [1.0], 't': [[0.2]]},
    'bounds': [2, 3, 5, 10],
}

# A small scenario in which every process has several phases.
SMALL_TREE = {
    'name': 'small',
    'buffers': {'n1': 3, 'n2': 4},
    'arrival': ARRIVAL,
    'transmission': {'alpha': [0.7, 0.3], 't': [[0.4, 0.2], [0.1, 0.5]]},
    'computation': {'alpha': [0.5, 0.5], 't': [[0.3, 0.3], [0.0, 0.6]]},
    'vacation': {'alpha': [0.6545, 0.3455], 't': [[0.3035, 0.0617], [0.6738, 0.1916]]},
    'bounds': [5, 10, 20],
}


def toy_config(**changes):
    """Return the toy ScenarioConfig with top-level fields replaced."""
    return parse_config(dict(TOY_TREE, **changes))


def small_config(**changes):
    return parse_config(dict(SMALL_TREE, **changes))


def random_tree(rng, max_phases=3, max_n2=6):
    """
    Return a random valid scenario tree.

    Phase counts are at most max_phases and the buffers satisfy
    N1 < N2 <= max_n2.

    """
    def stochastic(rows, columns, slack=0.0):
        a = rng.random((rows, columns)) + 0.05
        return a / a.sum(axis=1, keepdims=True) * (1.0 - slack)

    def dph():
        k = int(rng.integers(1, max_phases + 1))
        t = stochastic(k, k + 1)[:, :k]
        return {'alpha': stochastic(1, k)[0].tolist(), 't': t.tolist()}

    m = int(rng.integers(1, max_phases + 1))
    d = stochastic(m, 2 * m)
    n2 = int(rng.integers(2, max_n2 + 1))
    return {
        'name': 'random',
        'buffers': {'n1': int(rng.integers(1, n2)), 'n2': n2},
        'arrival': {'d0': d[:, :m].tolist(), 'd1': d[:, m:].tolist()},
        'transmission': dph(),
        'computation': dph(),
        'vacation': dph(),
    }


class AssertArrayMixin:

    """A unittest.TestCase mixin to compare numpy arrays."""

    def assertArrayClose(self, actual, expected, atol=1e-12, rtol=0.0, msg=''):
        np.testing.assert_allclose(np.asarray(actual, dtype=float),
                                   np.asarray(expected, dtype=float),
                                   atol=atol, rtol=rtol, err_msg=msg)

    def assertStochastic(self, matrix, tol=1e-12):
        rows = np.asarray(matrix).sum(axis=1)
        self.assertLess(float(np.max(np.abs(rows - 1.0))), tol)


class SetupDefaults(object):

    """
    Mix this class in to a unittest.TestCase to change defaults safely.

    Call setup_defaults() with the values to replace in setUp() and
    teardown_defaults() in tearDown().

    """

    def setup_defaults(self, **values):
        self.original_defaults = dict((name, getattr(defaults, name)) for name in values)
        for name, value in values.items():
            setattr(defaults, name, value)

    def teardown_defaults(self):
        for name, value in self.original_defaults.items():
            setattr(defaults, name, value)

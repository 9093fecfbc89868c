# coding: utf-8

"""
Exposes functionality needed throughout the project.

"""

import numpy as np


def read(path):
    """
    Return the contents of a text file as a unicode string.

    """
    with open(path, 'rb') as f:
        b = f.read()
    return b.decode('utf-8')


def as_matrix(value, name='matrix'):
    """
    Return the given array-like as a 2-d float array.

    Scalars become 1x1 matrices and flat sequences become row vectors, so
    that configs may write order-1 distributions as plain numbers.

    """
    try:
        a = np.array(value, dtype=float)
    except (TypeError, ValueError) as err:
        raise ConfigurationError("%s is not numeric: %s" % (name, err), path=name)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(1, -1)
    elif a.ndim != 2:
        raise ConfigurationError("%s must be a matrix, got %d dimensions" % (name, a.ndim),
                                 path=name)
    return a


def as_row_vector(value, name='vector'):
    """Return the given array-like as a 1-d float array."""
    try:
        a = np.atleast_1d(np.array(value, dtype=float))
    except (TypeError, ValueError) as err:
        raise ConfigurationError("%s is not numeric: %s" % (name, err), path=name)
    if a.ndim != 1:
        raise ConfigurationError("%s must be a vector" % name, path=name)
    return a


class SolverMethod(object):

    """Contains the valid values for the stationary-solver method."""

    direct = 'direct'
    matrix_geometric = 'mg'

    @classmethod
    def values(cls):
        return (cls.direct, cls.matrix_geometric)


class MultiAccess(object):

    """Contains the valid values for multi_access_rate()'s mode."""

    ofdma = 'ofdma'
    noma = 'noma'


class TandemDelayError(Exception):
    """Base class for tandemdelay exceptions."""
    pass


class ConfigurationError(TandemDelayError):

    """
    An exception raised for an invalid or unreadable configuration.

    The path attribute names the offending field, e.g. "transmission.t[0]".

    """

    def __init__(self, message, path=None):
        TandemDelayError.__init__(self, message)
        self.path = path

    def __str__(self):
        message = TandemDelayError.__str__(self)
        if self.path is None or message.startswith(self.path):
            return message
        return "%s: %s" % (self.path, message)


class ModelValidationError(ConfigurationError):
    """An exception raised when a D-MAP or D-PH fails validation."""
    pass


class LayoutError(ConfigurationError):
    """An exception raised for invalid buffer sizes or phase counts."""
    pass


class StateIndexError(TandemDelayError, IndexError):
    """An exception raised when a state lies outside the state space."""
    pass


class SolverError(TandemDelayError):

    """
    An exception raised when a numerical procedure fails.

    The diagnostics attribute carries whatever the procedure knew when it
    stopped (iterations, last residual, ...).

    """

    def __init__(self, message, diagnostics=None):
        TandemDelayError.__init__(self, message)
        if diagnostics is None:
            diagnostics = {}
        self.diagnostics = diagnostics


class ConsistencyError(SolverError):
    """An exception raised when an internal invariant does not hold."""
    pass


class DegenerateModelError(SolverError):
    """An exception raised when no task can ever enter queue 1."""
    pass


class SimulationError(TandemDelayError):
    """An exception raised when a simulation cannot be run."""
    pass


class NotConvergedWarning(UserWarning):
    """Warns that the sequential procedure stopped at max_slots."""
    pass


class TruncationWarning(UserWarning):
    """Warns that the delay recursion stopped before reaching tail_eps."""
    pass

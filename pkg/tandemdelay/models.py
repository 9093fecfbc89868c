# coding: utf-8

"""
Exposes the DMap and DPh classes and the functions that operate on them.

A DMap is a discrete-time Markovian arrival process given by two m x m
matrices: d0 (phase transition without an arrival) and d1 (phase transition
with one arrival).  A DPh is a discrete phase-type distribution given by an
initial vector alpha and a substochastic matrix t; it describes durations
that last at least one slot.

Phases are numbered from 0 throughout the package.

"""

import bisect
import logging
import math

import numpy as np
from scipy import linalg

from tandemdelay import defaults
from tandemdelay.common import MultiAccess, ModelValidationError
from tandemdelay.common import as_matrix, as_row_vector


logger = logging.getLogger(__name__)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_probabilities(a, name, tol):
    if not np.all(np.isfinite(a)):
        raise ModelValidationError("%s has non-finite entries" % name, path=name)
    if a.min() < -tol or a.max() > 1.0 + tol:
        raise ModelValidationError("%s has entries outside [0, 1]" % name, path=name)


class DMap(object):

    """
    A discrete-time Markovian arrival process (d0, d1).

    Instances are validated on construction and immutable afterwards, so
    they can be shared freely (e.g. across worker processes).

    >>> bernoulli = DMap([[0.7]], [[0.3]])
    >>> bernoulli.m
    1
    >>> round(bernoulli.arrival_rate, 12)
    0.3

    """

    def __init__(self, d0, d1, tol=None):
        """
        Construct and validate an instance.

        Arguments:

          d0: an m x m nonnegative matrix of phase transitions without an
            arrival.

          d1: an m x m nonnegative matrix of phase transitions with one
            arrival.

          tol: the tolerance on the row sums of d0 + d1.  Defaults to the
            package default.

        """
        if tol is None:
            tol = defaults.STOCHASTIC_TOL

        d0 = as_matrix(d0, 'arrival.d0')
        d1 = as_matrix(d1, 'arrival.d1')

        m = d0.shape[0]
        if d0.shape != (m, m):
            raise ModelValidationError("d0 must be square, got %s" % (d0.shape, ),
                                       path='arrival.d0')
        if d1.shape != (m, m):
            raise ModelValidationError("d1 must have the shape of d0 %s, got %s" %
                                       ((m, m), d1.shape), path='arrival.d1')

        _check_probabilities(d0, 'arrival.d0', tol)
        _check_probabilities(d1, 'arrival.d1', tol)

        row_sums = (d0 + d1).sum(axis=1)
        bad = np.flatnonzero(np.abs(row_sums - 1.0) > tol)
        if bad.size:
            raise ModelValidationError("rows of d0 + d1 must sum to 1; row %d sums to %r" %
                                       (bad[0], row_sums[bad[0]]), path='arrival')
        if not (d0 > 0).any():
            raise ModelValidationError("d0 needs at least one positive entry", path='arrival.d0')
        if not (d1 > 0).any():
            raise ModelValidationError("d1 needs at least one positive entry", path='arrival.d1')

        self.d0 = _frozen(np.clip(d0, 0.0, 1.0))
        self.d1 = _frozen(np.clip(d1, 0.0, 1.0))
        self.m = m
        self._stationary = None
        self._cumulative = None
        self._rows = None

    def __repr__(self):
        return "DMap(d0=%s, d1=%s)" % (self.d0.tolist(), self.d1.tolist())

    def __eq__(self, other):
        return (isinstance(other, DMap) and np.array_equal(self.d0, other.d0) and
                np.array_equal(self.d1, other.d1))

    def __ne__(self, other):
        return not self == other

    def __getstate__(self):
        return {'d0': self.d0.tolist(), 'd1': self.d1.tolist()}

    def __setstate__(self, state):
        self.__init__(state['d0'], state['d1'])

    @property
    def rate_matrix(self):
        """Return D = d0 + d1, the phase transition matrix."""
        return self.d0 + self.d1

    @property
    def stationary(self):
        """Return the stationary phase distribution (computed once)."""
        if self._stationary is None:
            self._stationary = _frozen(dmap_stationary(self))
        return self._stationary

    @property
    def arrival_rate(self):
        return dmap_arrival_rate(self)

    @property
    def cumulative(self):
        """
        Return the row-wise cumulative sums of [d0 | d1].

        Column j < m of a row means "move to phase j, no arrival"; column
        m + j means "move to phase j with an arrival".

        """
        if self._cumulative is None:
            c = np.cumsum(np.hstack([self.d0, self.d1]), axis=1)
            c[:, -1] = 1.0
            self._cumulative = _frozen(c)
        return self._cumulative

    @property
    def cumulative_rows(self):
        """Return cumulative as a list of lists, the form draw() takes."""
        if self._rows is None:
            self._rows = self.cumulative.tolist()
        return self._rows

    def to_dict(self):
        return {'d0': self.d0.tolist(), 'd1': self.d1.tolist()}


class DPh(object):

    """
    A discrete phase-type distribution (alpha, t) on {1, 2, ...} slots.

    >>> geometric_half = DPh([1.0], [[0.5]])
    >>> geometric_half.mean
    2.0

    """

    def __init__(self, alpha, t, name='dph', tol=None):
        """
        Construct and validate an instance.

        Arguments:

          alpha: the initial phase probabilities.  They must sum to 1, i.e.
            no duration can be zero slots.

          t: the k x k substochastic matrix of phase transitions.

          name: the config field the distribution came from, used in error
            messages.

        """
        if tol is None:
            tol = defaults.STOCHASTIC_TOL

        alpha = as_row_vector(alpha, '%s.alpha' % name)
        t = as_matrix(t, '%s.t' % name)

        k = alpha.shape[0]
        if t.shape != (k, k):
            raise ModelValidationError("t must be %d x %d to match alpha, got %s" %
                                       (k, k, t.shape), path='%s.t' % name)

        _check_probabilities(alpha, '%s.alpha' % name, tol)
        _check_probabilities(t, '%s.t' % name, tol)

        if abs(alpha.sum() - 1.0) > tol:
            raise ModelValidationError("alpha must sum to 1, got %r" % alpha.sum(),
                                       path='%s.alpha' % name)
        row_sums = t.sum(axis=1)
        if (row_sums > 1.0 + tol).any():
            row = int(np.argmax(row_sums))
            raise ModelValidationError("row %d of t sums to %r > 1" % (row, row_sums[row]),
                                       path='%s.t' % name)

        t = np.clip(t, 0.0, 1.0)
        try:
            fundamental = linalg.solve(np.eye(k) - t, np.ones(k))
        except (linalg.LinAlgError, ValueError) as err:
            raise ModelValidationError("I - t is singular: %s" % err, path='%s.t' % name)
        if not np.all(np.isfinite(fundamental)) or (fundamental < 1.0 - 1e-9).any():
            raise ModelValidationError("I - t is singular or t is not substochastic",
                                       path='%s.t' % name)

        self.alpha = _frozen(np.clip(alpha, 0.0, 1.0))
        self.t = _frozen(t)
        self.k = k
        self.name = name
        self._mean = float(self.alpha.dot(fundamental))
        self._cumulative = None
        self._rows = None
        self._alpha_rows = None

    def __repr__(self):
        return "DPh(alpha=%s, t=%s)" % (self.alpha.tolist(), self.t.tolist())

    def __eq__(self, other):
        return (isinstance(other, DPh) and np.array_equal(self.alpha, other.alpha) and
                np.array_equal(self.t, other.t))

    def __ne__(self, other):
        return not self == other

    def __getstate__(self):
        return {'alpha': self.alpha.tolist(), 't': self.t.tolist(), 'name': self.name}

    def __setstate__(self, state):
        self.__init__(state['alpha'], state['t'], name=state['name'])

    @property
    def exit_vector(self):
        """Return t0 = e - t e, the per-phase completion probabilities."""
        return np.clip(1.0 - self.t.sum(axis=1), 0.0, 1.0)

    @property
    def mean(self):
        return self._mean

    @property
    def rate(self):
        """Return 1 / mean, e.g. the service rate in tasks per slot."""
        return 1.0 / self._mean

    @property
    def cumulative(self):
        """
        Return the row-wise cumulative sums of [t | t0].

        The last column of a row is the completion event.

        """
        if self._cumulative is None:
            c = np.cumsum(np.hstack([self.t, self.exit_vector[:, None]]), axis=1)
            c[:, -1] = 1.0
            self._cumulative = _frozen(c)
        return self._cumulative

    @property
    def cumulative_rows(self):
        if self._rows is None:
            self._rows = self.cumulative.tolist()
        return self._rows

    @property
    def alpha_rows(self):
        """Return the cumulative sums of alpha as a list."""
        if self._alpha_rows is None:
            c = np.cumsum(self.alpha)
            c[-1] = 1.0
            self._alpha_rows = c.tolist()
        return self._alpha_rows

    def to_dict(self):
        return {'alpha': self.alpha.tolist(), 't': self.t.tolist()}


def geometric(rate, name='dph'):
    """
    Return the order-1 D-PH with the given completion probability per slot.

    This is the (beta = 1, S = 1 - rate) form used for the transmission-rate
    sweep, e.g. geometric(0.3571) has S = 0.6429.

    """
    if not 0.0 < rate <= 1.0:
        raise ModelValidationError("rate must lie in (0, 1], got %r" % rate, path=name)
    return DPh([1.0], [[1.0 - rate]], name=name)


def dmap_stationary(dmap):
    """
    Return the stationary vector pi of D = d0 + d1.

    Raises ModelValidationError if D does not have a unique stationary
    vector (i.e. it has more than one closed class).

    """
    m = dmap.m
    if m == 1:
        return np.ones(1)

    kernel = linalg.null_space((dmap.rate_matrix - np.eye(m)).T, rcond=1e-10)
    if kernel.shape[1] != 1:
        raise ModelValidationError("D = d0 + d1 must have a unique stationary vector; "
                                   "the null space of D - I has dimension %d" % kernel.shape[1],
                                   path='arrival')

    pi = kernel[:, 0]
    pi = pi / pi.sum()
    if pi.min() < -defaults.NEGATIVE_CLAMP:
        raise ModelValidationError("stationary vector of D has negative entries",
                                   path='arrival')
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def dmap_arrival_rate(dmap):
    """Return lambda = pi d1 e, the mean number of arrivals per slot."""
    return float(dmap.stationary.dot(dmap.d1).sum())


def dph_mean(dph):
    """Return alpha (I - t)^-1 e, the mean duration in slots."""
    return dph.mean


def dph_pmf(dph, n):
    """
    Return the probability that the duration equals n slots.

    This is alpha t^(n-1) t0 for n >= 1.

    """
    if n < 1 or int(n) != n:
        raise ValueError("n must be an integer >= 1, got %r" % (n, ))
    v = dph.alpha.dot(np.linalg.matrix_power(dph.t, int(n) - 1))
    return float(min(max(v.dot(dph.exit_vector), 0.0), 1.0))


def dph_survival(dph, n):
    """Return the probability that the duration exceeds n slots."""
    if n < 0:
        raise ValueError("n must be >= 0, got %r" % (n, ))
    v = dph.alpha.dot(np.linalg.matrix_power(dph.t, int(n)))
    return float(min(max(v.sum(), 0.0), 1.0))


def dph_cdf(dph, n):
    """Return the probability that the duration is at most n slots."""
    return 1.0 - dph_survival(dph, n)


def dph_pmf_series(dph, tail=1e-12, n_max=None):
    """
    Return the pmf p_1, p_2, ... as an array, truncated at tail mass `tail`.

    """
    if n_max is None:
        n_max = defaults.N_MAX
    exit_vector = dph.exit_vector
    v = dph.alpha.copy()
    values = []
    while len(values) < n_max:
        values.append(v.dot(exit_vector))
        v = v.dot(dph.t)
        if v.sum() < tail:
            break
    return np.clip(np.array(values), 0.0, 1.0)


def draw(cumulative, rng):
    """
    Return the index picked by one uniform from a list of cumulative
    probabilities ending in 1.

    Arguments:

      rng: a numpy.random.Generator, or any object whose random() method
        returns uniforms on [0, 1).

    """
    return bisect.bisect_right(cumulative, rng.random())


def dph_start(dph, rng):
    """Return the initial phase of a new duration, drawn from alpha."""
    return min(draw(dph.alpha_rows, rng), dph.k - 1)


def dph_step(dph, phase, rng):
    """
    Advance a running duration by one slot.

    Returns the next phase, or None when the duration completes.

    """
    column = draw(dph.cumulative_rows[phase], rng)
    return None if column >= dph.k else column


def dph_sample(dph, rng):
    """
    Draw one duration in slots by running the absorbing phase chain.

    Arguments:

      rng: a numpy.random.Generator; only this stream is consumed.

    """
    phase = dph_start(dph, rng)
    slots = 0
    while phase is not None:
        slots += 1
        phase = dph_step(dph, phase, rng)
    return slots


def dmap_start(dmap, rng):
    """Return a phase drawn from the stationary phase distribution."""
    c = np.cumsum(dmap.stationary)
    c[-1] = 1.0
    return min(draw(c.tolist(), rng), dmap.m - 1)


def dmap_step(dmap, phase, rng):
    """
    Advance the D-MAP by one slot from the given phase.

    Returns a pair (next_phase, arrived).

    """
    m = dmap.m
    if not 0 <= phase < m:
        raise IndexError("phase %r out of range for m=%d" % (phase, m))
    column = min(draw(dmap.cumulative_rows[phase], rng), 2 * m - 1)
    if column >= m:
        return column - m, True
    return column, False


def multi_access_rate(mode, bandwidth, power, gain, noise, other_bandwidths=(),
                      other_powers=(), other_gains=()):
    """
    Return the uplink data rate of one user under OFDMA or NOMA.

    Arguments:

      mode: MultiAccess.ofdma or MultiAccess.noma.

      bandwidth: the shared uplink bandwidth B.

      power, gain, noise: the user's transmission power p, channel power
        gain |h|^2 and noise power sigma.

      other_bandwidths: the bandwidths B_n allocated to the other users
        (OFDMA only).

      other_powers, other_gains: the powers p_n and channel power gains of
        the other users (NOMA only).

    """
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive, got %r" % bandwidth)
    if power < 0 or gain < 0:
        raise ValueError("power and gain must be nonnegative")
    if noise <= 0:
        raise ValueError("noise must be positive, got %r" % noise)

    mode = str(mode).lower()
    if mode == MultiAccess.ofdma:
        residual = bandwidth - sum(other_bandwidths)
        if residual < 0:
            raise ValueError("bandwidth allocated to other users exceeds %r" % bandwidth)
        return residual * math.log2(1.0 + power * gain / noise)

    if mode == MultiAccess.noma:
        if len(other_powers) != len(other_gains):
            raise ValueError("other_powers and other_gains must have equal length")
        if any(p < 0 for p in other_powers) or any(g < 0 for g in other_gains):
            raise ValueError("interfering powers and gains must be nonnegative")
        interference = sum(p * g for p, g in zip(other_powers, other_gains))
        return bandwidth * math.log2(1.0 + power * gain / (noise + interference))

    raise ValueError("unknown multi-access mode: %r" % (mode, ))


def transmission_time_slots(task_bits, rate, slot_ms=None):
    """
    Return the transmission time L / r of one task, in slots.

    Arguments:

      task_bits: the task size L.

      rate: the data rate r in bits per second.

      slot_ms: the slot length in milliseconds.  Defaults to the package
        default.

    """
    if slot_ms is None:
        slot_ms = defaults.SLOT_MS
    if rate <= 0:
        raise ValueError("rate must be positive, got %r" % rate)
    return task_bits / rate * 1000.0 / slot_ms

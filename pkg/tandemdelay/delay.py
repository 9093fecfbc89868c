# coding: utf-8

"""
Computes the end-to-end delay characteristics of a tagged task.

The tagged task starts from z, the state distribution just after a task
enters queue 1.  Following it through the arrival-censored (tilde) kernel,
the task has left the system exactly when the chain reaches level (0, 0),
so the delay CPD after n slots is the mass absorbed there after n steps.

"""

import logging
import math
import warnings

import numpy as np

from tandemdelay import defaults
from tandemdelay.common import ConsistencyError, DegenerateModelError, TruncationWarning
from tandemdelay.stationary import StationaryDistribution, mean_in_system


logger = logging.getLogger(__name__)


class TaggedState(object):

    """
    The distribution z seen by a task just after it enters queue 1.

    Attributes: z (a probability vector with no mass on level 0), p_off
    (the offloading ratio) and admitted (z-hat e, the admissions per slot).

    """

    def __init__(self, z, p_off, admitted):
        self.z = z
        self.p_off = p_off
        self.admitted = admitted

    def __repr__(self):
        return "TaggedState(p_off=%r)" % self.p_off


class CpdResult(object):

    """The delay CPD with its truncation record."""

    def __init__(self, cpd, tail, truncated, mass_error):
        self.cpd = cpd
        self.tail = tail
        self.truncated = truncated
        self.mass_error = mass_error

    @property
    def n_stop(self):
        return len(self.cpd)


class DelayCharacteristics(object):

    """
    The delay distribution and the derived performance measures.

    Index n - 1 of the cpd, pmf and violation arrays holds the value for a
    delay bound of n slots.

    """

    def __init__(self, cpd, pmf, violation, d_ave, d_ave_littles, d_sd, p_off,
                 p2_full, tail=0.0, truncated=False, slot_ms=None, diagnostics=None):
        if slot_ms is None:
            slot_ms = defaults.SLOT_MS
        self.cpd = cpd
        self.pmf = pmf
        self.violation = violation
        self.d_ave = d_ave
        self.d_ave_littles = d_ave_littles
        self.d_sd = d_sd
        self.p_off = p_off
        self.p2_full = p2_full
        self.tail = tail
        self.truncated = truncated
        self.slot_ms = slot_ms
        self.diagnostics = diagnostics if diagnostics is not None else {}

    def __repr__(self):
        return ("DelayCharacteristics(d_ave=%.6g, d_sd=%.6g, p_off=%.6g, p2_full=%.6g)" %
                (self.d_ave, self.d_sd, self.p_off, self.p2_full))

    @property
    def n_stop(self):
        return len(self.cpd)

    @property
    def d_ave_ms(self):
        return self.d_ave * self.slot_ms

    @property
    def d_sd_ms(self):
        return self.d_sd * self.slot_ms

    def cpd_at(self, n):
        """Return the probability that the delay is at most n slots."""
        if n < 1:
            return 0.0
        if n > self.n_stop:
            return float(self.cpd[-1])
        return float(self.cpd[n - 1])

    def violation_at(self, n):
        """Return W_n, the probability that the delay exceeds n slots."""
        return 1.0 - self.cpd_at(n)

    def quantile(self, q):
        """
        Return the smallest delay bound n (slots) with CPD(n) >= q.

        Returns None when q lies beyond the computed part of the CPD.

        """
        if not 0.0 <= q <= 1.0:
            raise ValueError("q must lie in [0, 1], got %r" % (q, ))
        position = int(np.searchsorted(self.cpd, q, side='left'))
        if position >= self.n_stop:
            return None
        return position + 1

    @property
    def unimodal(self):
        return is_unimodal(self.pmf)

    def to_dict(self):
        """Return the scalar measures and the truncation record."""
        return {
            'd_ave': self.d_ave,
            'd_ave_littles': self.d_ave_littles,
            'd_ave_ms': self.d_ave_ms,
            'd_sd': self.d_sd,
            'd_sd_ms': self.d_sd_ms,
            'p_off': self.p_off,
            'p2_full': self.p2_full,
            'n_stop': self.n_stop,
            'tail': self.tail,
            'truncated': self.truncated,
            'unimodal': self.unimodal,
            'slot_ms': self.slot_ms,
            'diagnostics': self.diagnostics,
        }


def _level_vectors(vector, layout):
    return [np.asarray(vector[layout.level_slice(i1)]) for i1 in range(layout.N1 + 1)]


def _step(levels, kernel):
    """Multiply level vectors by a block-tridiagonal LevelKernel."""
    N1 = kernel.layout.N1
    result = []
    for k1 in range(N1 + 1):
        acc = None
        for i1 in (k1 - 1, k1, k1 + 1):
            if not 0 <= i1 <= N1:
                continue
            family = kernel.level_family(i1, k1)
            if family is None:
                continue
            part = levels[i1].dot(kernel.family_matrix(family))
            acc = part if acc is None else acc + part
        result.append(acc)
    return result


def initial_tagged_distribution(x, hat, arrival_rate):
    """
    Return the TaggedState computed from x and the hat kernel.

    Arguments:

      x: the StationaryDistribution.

      hat: the hat LevelKernel (see kernel.build_hat).

      arrival_rate: the mean arrival rate of the D-MAP.

    """
    layout = hat.layout
    vector = x.x if isinstance(x, StationaryDistribution) else np.asarray(x)

    levels = _step(_level_vectors(vector, layout), hat)
    levels[0] = np.zeros_like(levels[0])
    z_hat = np.concatenate(levels)

    admitted = float(z_hat.sum())
    if not admitted > 0:
        raise DegenerateModelError("no task can enter queue 1 (z-hat e = %r)" % admitted)
    z = z_hat / admitted
    p_off = admitted / arrival_rate
    logger.debug("admitted %.6g tasks per slot, p_off %.6g", admitted, p_off)
    return TaggedState(z, p_off, admitted)


def delay_cpd(z, tilde, tail_eps=None, n_max=None):
    """
    Return the CpdResult of the tagged task's delay.

    The iteration stops once 1 - CPD(n) < tail_eps or at n = n_max, in
    which case a TruncationWarning is issued and recorded.

    """
    if tail_eps is None:
        tail_eps = defaults.TAIL_EPS
    if n_max is None:
        n_max = defaults.N_MAX
    if isinstance(z, TaggedState):
        z = z.z

    layout = tilde.layout
    m = layout.m
    levels = _level_vectors(z, layout)

    cpd = []
    mass_error = 0.0
    previous = 0.0
    tail = 1.0
    for n in range(1, n_max + 1):
        levels = _step(levels, tilde)
        absorbed = float(levels[0][:m].sum())
        mass_error = max(mass_error, abs(sum(level.sum() for level in levels) - 1.0))
        if absorbed < previous - defaults.NEGATIVE_CLAMP:
            raise ConsistencyError("delay CPD decreases at n=%d (%r < %r)" %
                                   (n, absorbed, previous))
        absorbed = min(max(absorbed, previous), 1.0)
        cpd.append(absorbed)
        previous = absorbed
        tail = 1.0 - absorbed
        if tail < tail_eps:
            break

    if mass_error > defaults.TILDE_TOL:
        raise ConsistencyError("tilde iteration lost mass (%r)" % mass_error)

    truncated = tail >= tail_eps
    if truncated:
        message = ("delay CPD stopped at n_max=%d with tail mass %.3g >= %.3g" %
                   (n_max, tail, tail_eps))
        logger.warning(message)
        warnings.warn(message, TruncationWarning)
    return CpdResult(np.array(cpd), tail, truncated, mass_error)


def delay_pmf_violation(cpd):
    """
    Return (pmf, violation) for a CPD sequence starting at n = 1.

    Small negative pmf values from rounding are clamped to zero.

    """
    cpd = np.asarray(cpd.cpd if isinstance(cpd, CpdResult) else cpd, dtype=float)
    pmf = np.diff(np.concatenate([[0.0], cpd]))
    if pmf.size and pmf.min() < -defaults.NEGATIVE_CLAMP:
        raise ConsistencyError("delay pmf has a negative value %r" % pmf.min())
    pmf = np.clip(pmf, 0.0, None)
    return pmf, 1.0 - cpd


def average_delay(pmf, x, arrival_rate, p_off, check=True):
    """
    Return (d_pmf, d_littles): the average delay from the pmf and from
    Little's law on the stationary queue lengths.

    Raises ConsistencyError when check is set and the two disagree by more
    than the configured relative tolerance.

    """
    n = np.arange(1, len(pmf) + 1)
    d_pmf = float(n.dot(pmf))
    d_littles = mean_in_system(x) / (arrival_rate * p_off)

    difference = abs(d_pmf - d_littles) / d_littles
    if check and difference > defaults.AVERAGE_DELAY_RTOL:
        raise ConsistencyError("average delay from the pmf (%.10g) and from Little's law "
                               "(%.10g) disagree" % (d_pmf, d_littles),
                               diagnostics={'relative_difference': difference})
    return d_pmf, d_littles


def delay_std(pmf, d_ave):
    """Return the standard deviation of the delay."""
    n = np.arange(1, len(pmf) + 1)
    return math.sqrt(float(np.dot(pmf, (n - d_ave) ** 2)))


def prob_q2_full(x):
    """Return the stationary probability that queue 2 holds N2 tasks."""
    layout = x.layout
    return sum(x.mass(i1, layout.N2) for i1 in range(layout.N1 + 1))


def tail_bounds(violation, tail):
    """
    Return the truncation record of a violation series.

    The decay rate is estimated from the last ten values of W_n and used
    to bound the delay mass the truncation cut off.

    """
    n_stop = len(violation)
    record = {'n_stop': n_stop, 'tail': tail,
              'trusted': n_stop * tail < defaults.TAIL_TRUST}
    if n_stop > 10 and violation[-11] > 0 and violation[-1] > 0:
        rate = (violation[-1] / violation[-11]) ** 0.1
        if rate < 1.0:
            record['decay_rate'] = rate
            record['mean_tail_bound'] = n_stop * tail + violation[-1] * rate / (1.0 - rate)
    return record


def is_unimodal(pmf, noise_floor=None):
    """
    Return whether the pmf has at most one strict local maximum.

    Changes smaller than noise_floor are ignored.

    """
    if noise_floor is None:
        noise_floor = defaults.UNIMODAL_NOISE_FLOOR
    steps = np.diff(np.asarray(pmf, dtype=float))
    signs = [1 if step > 0 else -1 for step in steps if abs(step) > noise_floor]
    peaks = sum(1 for a, b in zip(signs, signs[1:]) if a > 0 and b < 0)
    return peaks <= 1


def tail_mass_after_mode(pmf):
    """Return the pmf mass beyond its mode."""
    pmf = np.asarray(pmf)
    mode = int(np.argmax(pmf))
    return float(pmf[mode + 1:].sum())

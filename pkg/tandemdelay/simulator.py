# coding: utf-8

"""
Simulates the tandem system slot by slot.

Each slot the arrival phase, the phase of server 1 (service or vacation)
and the phase of server 2 move first; then the queues are updated in the
order: computation completion, transfer of a transmitted task to queue 2,
admission of an arrival, choice of server 1's next activity.  This is the
order the analytic kernel assumes.

Four independent random streams drive the arrivals, the transmissions,
the computations and the vacations.  Estimates come from independent
replications (each with its own warmup) or from batch means over one long
run, and grow until every confidence interval is narrow enough.

"""

import logging
import math
import multiprocessing
import warnings
from collections import deque, namedtuple

import numpy as np
import scipy.stats

from tandemdelay import defaults
from tandemdelay.common import NotConvergedWarning, SimulationError
from tandemdelay.config import SimulationSettings
from tandemdelay.layout import IDLE, SERVING, VACATION
from tandemdelay.models import dmap_start, dmap_step, dph_start, dph_step


logger = logging.getLogger(__name__)


Estimate = namedtuple('Estimate', ['point', 'low', 'high'])

# Metrics whose confidence intervals the sequential procedure watches, in
# addition to W_n at every requested bound.
CONTROLLED_METRICS = ('d_ave', 'd_sd', 'p_off', 'p2_full')

PROBABILITY_METRICS = ('p_off', 'p2_full')

UNIFORM_BLOCK = 1 << 14


def violation_key(n):
    return 'W_%d' % n


def replication_streams(seed, index):
    """
    Return the four generators (arrivals, transmission, computation,
    vacation) of a replication.

    """
    children = np.random.SeedSequence([seed, index]).spawn(4)
    return [np.random.default_rng(child) for child in children]


class _Uniforms(object):

    """Serves the uniforms of a generator in blocks through random()."""

    def __init__(self, rng):
        self.rng = rng
        self.block = []
        self.i = 0

    def random(self):
        if self.i >= len(self.block):
            self.block = self.rng.random(UNIFORM_BLOCK).tolist()
            self.i = 0
        u = self.block[self.i]
        self.i += 1
        return u


class SegmentStats(object):

    """Counters accumulated over the recorded slots of one segment."""

    def __init__(self):
        self.slots = 0
        self.arrivals = 0
        self.admitted = 0
        self.q2_full = 0
        self.in_system = 0
        self.delays = []

    def metrics(self, bounds):
        """Return the segment's metric values keyed by name."""
        if not self.delays or not self.arrivals:
            raise SimulationError("segment of %d slots completed no task; increase "
                                  "segment_slots" % self.slots)
        delays = np.array(self.delays)
        values = {
            'd_ave': float(delays.mean()),
            'd_sd': float(delays.std(ddof=1)) if len(delays) > 1 else 0.0,
            'p_off': self.admitted / float(self.arrivals),
            'p2_full': self.q2_full / float(self.slots),
            'admitted_rate': self.admitted / float(self.slots),
            'mean_in_system': self.in_system / float(self.slots),
        }
        values['d_littles'] = (values['mean_in_system'] / values['admitted_rate']
                               if values['admitted_rate'] else float('nan'))
        for n in bounds:
            values[violation_key(n)] = float(np.mean(delays > n))
        return values


class SlotSimulator(object):

    """
    The slot-level state machine of the tandem system.

    Queue entries are the slot boundaries at which their tasks entered
    queue 1, so a task's delay is the boundary it leaves at minus the
    boundary it entered at.

    """

    def __init__(self, config, streams):
        """
        Arguments:

          config: a ScenarioConfig.

          streams: the four numpy Generators (see replication_streams()).

        """
        self.N1 = config.n1
        self.N2 = config.n2
        self.arrival = config.arrival
        self.transmission = config.transmission
        self.computation = config.computation
        self.vacation = config.vacation

        self.u_arrival, self.u_service1, self.u_service2, self.u_vacation = [
            _Uniforms(rng) for rng in streams]

        # Start in the stationary arrival phase with both queues empty.
        self.phase = dmap_start(self.arrival, self.u_arrival)
        self.q1 = deque()
        self.q2 = deque()
        self.mode = IDLE
        self.phase1 = 0
        self.phase2 = 0
        self.boundary = 0
        self.last_departure = -1

    def _start(self):
        """Start server 1 on queue 1: a vacation if queue 2 is full."""
        if len(self.q2) == self.N2:
            self.mode = VACATION
            self.phase1 = dph_start(self.vacation, self.u_vacation)
        else:
            self.mode = SERVING
            self.phase1 = dph_start(self.transmission, self.u_service1)

    def run(self, slots, stats=None):
        """
        Advance the system by a number of slots.

        Arguments:

          slots: the number of slots.

          stats: a SegmentStats to record into, or None to discard (warmup).

        """
        N1, N2 = self.N1, self.N2
        arrival, transmission = self.arrival, self.transmission
        computation, vacation = self.computation, self.vacation
        q1, q2 = self.q1, self.q2
        record = stats is not None

        for _ in range(slots):
            self.phase, arrived = dmap_step(arrival, self.phase, self.u_arrival)

            transmitted = expired = False
            if self.mode == SERVING:
                phase = dph_step(transmission, self.phase1, self.u_service1)
                if phase is None:
                    transmitted = True
                else:
                    self.phase1 = phase
            elif self.mode == VACATION:
                phase = dph_step(vacation, self.phase1, self.u_vacation)
                if phase is None:
                    expired = True
                else:
                    self.phase1 = phase

            computed = False
            q2_was_empty = not q2
            if q2:
                phase = dph_step(computation, self.phase2, self.u_service2)
                if phase is None:
                    computed = True
                else:
                    self.phase2 = phase

            self.boundary += 1
            if computed:
                entered = q2.popleft()
                if entered <= self.last_departure:
                    raise SimulationError("task entered at %d left after a later task" % entered)
                self.last_departure = entered
                if record:
                    stats.delays.append(self.boundary - entered)
            if transmitted:
                q2.append(q1.popleft())
            if q2 and (computed or q2_was_empty):
                self.phase2 = dph_start(computation, self.u_service2)

            admitted = arrived and len(q1) < N1
            if admitted:
                q1.append(self.boundary)

            if self.mode == IDLE:
                if admitted:
                    self._start()
            elif transmitted:
                if q1:
                    self._start()
                else:
                    self.mode = IDLE
            elif expired:
                self._start()

            if record:
                stats.slots += 1
                stats.arrivals += arrived
                stats.admitted += admitted
                stats.q2_full += len(q2) == N2
                stats.in_system += len(q1) + len(q2)

        return stats

    def check(self):
        """Raise SimulationError if the state breaks a structural invariant."""
        if not 0 <= len(self.q1) <= self.N1 or not 0 <= len(self.q2) <= self.N2:
            raise SimulationError("queue lengths (%d, %d) out of range" %
                                  (len(self.q1), len(self.q2)))
        if self.mode == SERVING and len(self.q2) == self.N2:
            raise SimulationError("server 1 transmits while queue 2 is full")
        if (self.mode == IDLE) != (not self.q1):
            raise SimulationError("server 1 is %s with %d tasks in queue 1" %
                                  (self.mode, len(self.q1)))


class SimConfig(object):

    """
    A scenario together with the settings of the sequential procedure.

    """

    def __init__(self, scenario, settings=None, bounds=None, workers=None):
        """
        Arguments:

          scenario: the ScenarioConfig to simulate.

          settings: a SimulationSettings.  Defaults to the scenario's.

          bounds: the delay bounds whose violation probabilities are
            estimated.  Defaults to the scenario's.

          workers: the number of processes running replications.  Defaults
            to the package default.

        """
        self.scenario = scenario
        self.settings = scenario.simulation if settings is None else settings
        if not isinstance(self.settings, SimulationSettings):
            raise TypeError("settings must be SimulationSettings, got %r" % (self.settings, ))
        self.bounds = tuple(scenario.bounds if bounds is None else bounds)
        self.workers = defaults.WORKERS if workers is None else int(workers)

    def __repr__(self):
        return "SimConfig(%r, seed=%d)" % (self.scenario, self.settings.seed)


class SimEstimates(object):

    """
    Point estimates and confidence intervals of the delay characteristics.

    """

    def __init__(self, estimates, bounds, slots, tasks, segments, converged, settings):
        self.estimates = estimates
        self.bounds = tuple(bounds)
        self.slots = slots
        self.tasks = tasks
        self.segments = segments
        self.converged = converged
        self.settings = settings

    def __repr__(self):
        return "SimEstimates(segments=%d, slots=%d, converged=%r)" % (
            self.segments, self.slots, self.converged)

    def __getitem__(self, name):
        return self.estimates[name]

    def violation(self, n):
        """Return the Estimate of W_n."""
        return self.estimates[violation_key(n)]

    def to_dict(self):
        return {
            'estimates': dict((name, estimate._asdict())
                              for name, estimate in sorted(self.estimates.items())),
            'bounds': list(self.bounds),
            'slots': self.slots,
            'tasks': self.tasks,
            'segments': self.segments,
            'converged': self.converged,
            'settings': self.settings.to_dict(),
        }


def confidence_interval(values, confidence):
    """
    Return the Student-t Estimate of the mean of independent values.

    """
    values = np.asarray(values, dtype=float)
    point = float(values.mean())
    if len(values) < 2:
        return Estimate(point, -math.inf, math.inf)
    quantile = scipy.stats.t.ppf(0.5 + confidence / 2.0, len(values) - 1)
    half = float(quantile * values.std(ddof=1) / math.sqrt(len(values)))
    return Estimate(point, point - half, point + half)


def _estimates(samples, bounds, confidence):
    estimates = {}
    for name in samples[0]:
        estimate = confidence_interval([sample[name] for sample in samples], confidence)
        if name in PROBABILITY_METRICS or name.startswith('W_'):
            estimate = Estimate(estimate.point, max(estimate.low, 0.0), min(estimate.high, 1.0))
        estimates[name] = estimate
    return estimates


def _precise(estimates, bounds, relative_accuracy):
    names = CONTROLLED_METRICS + tuple(violation_key(n) for n in bounds)
    for name in names:
        point, low, high = estimates[name]
        if (high - low) / 2.0 > relative_accuracy * abs(point):
            return False
    return True


def run_replication(args):
    """
    Run one independent replication and return its (metrics, tasks).

    The argument is a tuple (scenario, settings, bounds, index) so that the
    function can be mapped over a process pool.

    """
    scenario, settings, bounds, index = args
    simulator = SlotSimulator(scenario, replication_streams(settings.seed, index))
    simulator.run(settings.warmup)
    stats = simulator.run(settings.segment_slots, SegmentStats())
    return stats.metrics(bounds), len(stats.delays)


def _replications(sim_config):
    """Yield (metrics, tasks) of replications 0, 1, 2, ... in order."""
    def jobs(start, count):
        return [(sim_config.scenario, sim_config.settings, sim_config.bounds, index)
                for index in range(start, start + count)]

    index = 0
    if sim_config.workers <= 1:
        while True:
            yield run_replication(jobs(index, 1)[0])
            index += 1

    pool = multiprocessing.Pool(sim_config.workers)
    try:
        while True:
            batch = max(sim_config.workers, defaults.MIN_SEGMENTS if index == 0 else 0)
            for result in pool.map(run_replication, jobs(index, batch)):
                yield result
            index += batch
    finally:
        pool.terminate()


def _batches(sim_config):
    """Yield (metrics, tasks) of consecutive batches of one long run."""
    settings = sim_config.settings
    simulator = SlotSimulator(sim_config.scenario, replication_streams(settings.seed, 0))
    simulator.run(settings.warmup)
    while True:
        stats = simulator.run(settings.segment_slots, SegmentStats())
        yield stats.metrics(sim_config.bounds), len(stats.delays)


def simulate(sim_config):
    """
    Return the SimEstimates of a SimConfig (or of a ScenarioConfig with its
    own settings).

    Segments are added until every watched confidence interval has a half
    width of at most relative_accuracy times its point estimate, with at
    least MIN_SEGMENTS segments.  When max_slots recorded slots are reached
    first the result is flagged as not converged and a NotConvergedWarning
    is issued.  The result depends only on the master seed, not on the
    number of workers.

    """
    if not isinstance(sim_config, SimConfig):
        sim_config = SimConfig(sim_config)
    settings = sim_config.settings
    bounds = sim_config.bounds

    if settings.policy == 'batch_means':
        segments = _batches(sim_config)
    else:
        segments = _replications(sim_config)

    samples = []
    tasks = 0
    converged = False
    estimates = None
    try:
        for metrics, count in segments:
            samples.append(metrics)
            tasks += count
            if len(samples) < max(defaults.MIN_SEGMENTS, 2):
                continue
            estimates = _estimates(samples, bounds, settings.confidence)
            if _precise(estimates, bounds, settings.relative_accuracy):
                converged = True
                break
            if len(samples) * settings.segment_slots >= settings.max_slots:
                break
    finally:
        segments.close()

    slots = len(samples) * settings.segment_slots
    if estimates is None:
        estimates = _estimates(samples, bounds, settings.confidence)
    if not converged:
        message = ("simulation stopped after %d slots before reaching relative accuracy %g" %
                   (slots, settings.relative_accuracy))
        logger.warning(message)
        warnings.warn(message, NotConvergedWarning)
    logger.info("simulated %d segments (%d slots, %d tasks), converged=%r",
                len(samples), slots, tasks, converged)
    return SimEstimates(estimates, bounds, slots, tasks, len(samples), converged, settings)

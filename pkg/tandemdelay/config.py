# coding: utf-8

"""
This module provides the ScenarioConfig class and the functions that read
and write scenario documents.

A scenario document is a JSON tree (or YAML, when PyYAML is installed).
Model parameters have no defaults; numerical and simulation settings fall
back to the package defaults.  Errors name the offending field, e.g.
"transmission.t[0]".

"""

import copy
import json
import logging
import os
import warnings

from tandemdelay import defaults
from tandemdelay.common import ConfigurationError, SolverMethod, read
from tandemdelay.layout import build_layout
from tandemdelay.models import DMap, DPh, geometric

try:
    import yaml
except ImportError:
    yaml = None


logger = logging.getLogger(__name__)

YAML_EXTENSIONS = ('.yml', '.yaml')

ESTIMATION_POLICIES = ('replications', 'batch_means')

_TOP_LEVEL_KEYS = ('name', 'buffers', 'slot_ms', 'arrival', 'transmission', 'computation',
                   'vacation', 'solver', 'bounds', 'sweep', 'pmf', 'simulation')

# Allowed gap between mu1 and 1 - s1 for an order-1 transmission time.
SWEEP_PAIR_TOL = 1e-6


def _require(tree, key, path):
    if not isinstance(tree, dict):
        raise ConfigurationError("expected an object", path=path)
    if key not in tree:
        raise ConfigurationError("missing required field", path=_join(path, key))
    return tree[key]


def _join(path, key):
    return key if not path else '%s.%s' % (path, key)


def _check_keys(tree, allowed, path):
    if not isinstance(tree, dict):
        raise ConfigurationError("expected an object", path=path or None)
    for key in tree:
        if key not in allowed:
            raise ConfigurationError("unknown field", path=_join(path, key))


def _number(value, path, integer=False, positive=False, minimum=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError("expected a number, got %r" % (value, ), path=path)
    if integer and int(value) != value:
        raise ConfigurationError("expected an integer, got %r" % (value, ), path=path)
    if positive and not value > 0:
        raise ConfigurationError("expected a positive number, got %r" % (value, ), path=path)
    if minimum is not None and value < minimum:
        raise ConfigurationError("expected a number >= %r, got %r" % (minimum, value), path=path)
    return int(value) if integer else float(value)


def _vector(value, path):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [float(value)]
    if not isinstance(value, list) or not value:
        raise ConfigurationError("expected a non-empty list of numbers", path=path)
    return [_number(item, '%s[%d]' % (path, i)) for i, item in enumerate(value)]


def _matrix(value, path):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [[float(value)]]
    if not isinstance(value, list) or not value:
        raise ConfigurationError("expected a non-empty list of rows", path=path)
    rows = [_vector(row, '%s[%d]' % (path, i)) for i, row in enumerate(value)]
    for i, row in enumerate(rows):
        if len(row) != len(rows[0]):
            raise ConfigurationError("row has %d entries, expected %d" % (len(row), len(rows[0])),
                                     path='%s[%d]' % (path, i))
    return rows


def parse_dph(tree, path):
    """Return the DPh described by {"alpha": [...], "t": [[...]]}."""
    _check_keys(tree, ('alpha', 't'), path)
    alpha = _vector(_require(tree, 'alpha', path), _join(path, 'alpha'))
    t = _matrix(_require(tree, 't', path), _join(path, 't'))
    return DPh(alpha, t, name=path)


def parse_dmap(tree, path='arrival'):
    _check_keys(tree, ('d0', 'd1'), path)
    d0 = _matrix(_require(tree, 'd0', path), _join(path, 'd0'))
    d1 = _matrix(_require(tree, 'd1', path), _join(path, 'd1'))
    return DMap(d0, d1)


class SolverOptions(object):

    """The analytic solver settings of a scenario."""

    def __init__(self, method=None, tail_eps=None, n_max=None):
        if method is None:
            method = defaults.METHOD
        if tail_eps is None:
            tail_eps = defaults.TAIL_EPS
        if n_max is None:
            n_max = defaults.N_MAX

        if method not in SolverMethod.values():
            raise ConfigurationError("expected one of %s, got %r" %
                                     (', '.join(SolverMethod.values()), method),
                                     path='solver.method')
        self.method = method
        self.tail_eps = _number(tail_eps, 'solver.tail_eps', positive=True)
        self.n_max = _number(n_max, 'solver.n_max', integer=True, minimum=1)

    def to_dict(self):
        return {'method': self.method, 'tail_eps': self.tail_eps, 'n_max': self.n_max}


class SimulationSettings(object):

    """The sequential-procedure settings of a simulation run."""

    def __init__(self, seed=None, confidence=None, relative_accuracy=None, warmup=None,
                 max_slots=None, segment_slots=None, policy=None):
        p = 'simulation'
        self.seed = _number(defaults.SEED if seed is None else seed, p + '.seed',
                            integer=True, minimum=0)
        self.confidence = _number(defaults.CONFIDENCE if confidence is None else confidence,
                                  p + '.confidence')
        if not 0.0 < self.confidence < 1.0:
            raise ConfigurationError("expected a value in (0, 1), got %r" % self.confidence,
                                     path=p + '.confidence')
        self.relative_accuracy = _number(
            defaults.RELATIVE_ACCURACY if relative_accuracy is None else relative_accuracy,
            p + '.relative_accuracy', positive=True)
        self.warmup = _number(defaults.WARMUP_SLOTS if warmup is None else warmup,
                              p + '.warmup', integer=True, minimum=0)
        self.max_slots = _number(defaults.MAX_SLOTS if max_slots is None else max_slots,
                                 p + '.max_slots', integer=True, minimum=1)
        self.segment_slots = _number(
            defaults.SEGMENT_SLOTS if segment_slots is None else segment_slots,
            p + '.segment_slots', integer=True, minimum=1)
        self.policy = defaults.ESTIMATION_POLICY if policy is None else policy
        if self.policy not in ESTIMATION_POLICIES:
            raise ConfigurationError("expected one of %s, got %r" %
                                     (', '.join(ESTIMATION_POLICIES), self.policy),
                                     path=p + '.policy')

    def to_dict(self):
        return {
            'seed': self.seed,
            'confidence': self.confidence,
            'relative_accuracy': self.relative_accuracy,
            'warmup': self.warmup,
            'max_slots': self.max_slots,
            'segment_slots': self.segment_slots,
            'policy': self.policy,
        }

    def replace(self, **kwargs):
        """Return a copy with the given settings replaced (None keeps a setting)."""
        settings = self.to_dict()
        settings.update((key, value) for key, value in kwargs.items() if value is not None)
        return SimulationSettings(**settings)


class Sweep(object):

    """
    A grid of transmission rates mu1 and the computation-time variants to
    evaluate them with.

    Each grid point uses the order-1 transmission time with S1 = s1; the
    variants map a name to the computation DPh replacing the scenario's.

    """

    def __init__(self, mu1, s1=None, variants=None):
        self.mu1 = [float(mu) for mu in mu1]
        self.s1 = [1.0 - mu for mu in self.mu1] if s1 is None else [float(s) for s in s1]
        if len(self.s1) != len(self.mu1):
            raise ConfigurationError("s1 has %d values, mu1 has %d" %
                                     (len(self.s1), len(self.mu1)), path='sweep.s1')
        for i, (mu, s) in enumerate(zip(self.mu1, self.s1)):
            if not 0.0 <= s < 1.0:
                raise ConfigurationError("expected a value in [0, 1), got %r" % s,
                                         path='sweep.s1[%d]' % i)
            if abs(mu - (1.0 - s)) > SWEEP_PAIR_TOL:
                message = ("sweep point %d: mu1=%r does not equal 1 - s1=%r; the rate of the "
                           "order-1 transmission time is 1 - s1" % (i, mu, 1.0 - s))
                logger.warning(message)
                warnings.warn(message)
        self.variants = dict(variants or {})

    def points(self):
        """Return the (mu1, transmission DPh) grid points."""
        return [(mu, geometric(1.0 - s, name='transmission'))
                for mu, s in zip(self.mu1, self.s1)]

    def to_dict(self):
        return {
            'mu1': list(self.mu1),
            's1': list(self.s1),
            'variants': dict((name, dph.to_dict()) for name, dph in sorted(self.variants.items())),
        }


class ScenarioConfig(object):

    """
    A complete description of one tandem system and what to compute for it.

    Instances are immutable by convention: the with_*() methods return
    modified copies.

    """

    def __init__(self, arrival, transmission, computation, vacation, n1, n2,
                 name=None, slot_ms=None, solver=None, bounds=None, sweep=None,
                 pmf=None, simulation=None):
        """
        Arguments:

          arrival: the DMap of task arrivals.

          transmission, computation, vacation: the DPh of the transmission
            time, the computation time and the vacation time.

          n1, n2: the buffer sizes of the transmission and the computation
            queue.

          bounds: the delay bounds of interest in slots.  Defaults to the
            package default.

          sweep: an optional Sweep.

          pmf: an optional list of mu1 values for delay pmf series.

          simulation: a SimulationSettings.  Defaults to all-default settings.

        """
        self.name = 'scenario' if name is None else str(name)
        self.arrival = arrival
        self.transmission = transmission
        self.computation = computation
        self.vacation = vacation
        self.n1 = _number(n1, 'buffers.n1', integer=True, minimum=1)
        self.n2 = _number(n2, 'buffers.n2', integer=True, minimum=1)
        self.slot_ms = _number(defaults.SLOT_MS if slot_ms is None else slot_ms, 'slot_ms',
                               positive=True)
        self.solver = SolverOptions() if solver is None else solver
        if bounds is None:
            bounds = defaults.BOUNDS
        self.bounds = tuple(_number(b, 'bounds[%d]' % i, integer=True, minimum=1)
                            for i, b in enumerate(bounds))
        self.sweep = sweep
        self.pmf = None if pmf is None else [float(mu) for mu in pmf]
        self.simulation = SimulationSettings() if simulation is None else simulation

        # Validates the buffer sizes and the phase counts together.
        self.layout()

    def __repr__(self):
        return "ScenarioConfig(name=%r, n1=%d, n2=%d)" % (self.name, self.n1, self.n2)

    def __eq__(self, other):
        return isinstance(other, ScenarioConfig) and self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not self == other

    def layout(self):
        """Return the PhaseLayout of this scenario."""
        return build_layout(self.arrival.m, self.transmission.k, self.computation.k,
                            self.vacation.k, self.n1, self.n2)

    @property
    def arrival_rate(self):
        return self.arrival.arrival_rate

    def _replace(self, **kwargs):
        clone = copy.copy(self)
        clone.__dict__.update(kwargs)
        clone.layout()
        return clone

    def with_transmission(self, transmission, name=None):
        """Return a copy with another transmission-time DPh."""
        return self._replace(transmission=transmission,
                             name=self.name if name is None else name)

    def with_computation(self, computation, name=None):
        """Return a copy with another computation-time DPh."""
        return self._replace(computation=computation,
                             name=self.name if name is None else name)

    def with_solver(self, method=None, tail_eps=None, n_max=None):
        current = self.solver
        return self._replace(solver=SolverOptions(
            current.method if method is None else method,
            current.tail_eps if tail_eps is None else tail_eps,
            current.n_max if n_max is None else n_max))

    def with_bounds(self, bounds):
        return self._replace(bounds=tuple(int(b) for b in bounds))

    def with_simulation(self, **kwargs):
        return self._replace(simulation=self.simulation.replace(**kwargs))

    def to_dict(self):
        """Return the scenario as a JSON-compatible tree."""
        tree = {
            'name': self.name,
            'buffers': {'n1': self.n1, 'n2': self.n2},
            'slot_ms': self.slot_ms,
            'arrival': self.arrival.to_dict(),
            'transmission': self.transmission.to_dict(),
            'computation': self.computation.to_dict(),
            'vacation': self.vacation.to_dict(),
            'solver': self.solver.to_dict(),
            'bounds': list(self.bounds),
            'simulation': self.simulation.to_dict(),
        }
        if self.sweep is not None:
            tree['sweep'] = self.sweep.to_dict()
        if self.pmf is not None:
            tree['pmf'] = {'mu1': list(self.pmf)}
        return tree


def parse_config(tree):
    """
    Return the ScenarioConfig described by a JSON-compatible tree.

    Raises ConfigurationError naming the offending field.

    """
    _check_keys(tree, _TOP_LEVEL_KEYS, '')

    buffers = _require(tree, 'buffers', '')
    _check_keys(buffers, ('n1', 'n2'), 'buffers')
    n1 = _number(_require(buffers, 'n1', 'buffers'), 'buffers.n1', integer=True, minimum=1)
    n2 = _number(_require(buffers, 'n2', 'buffers'), 'buffers.n2', integer=True, minimum=1)

    arrival = parse_dmap(_require(tree, 'arrival', ''))
    transmission = parse_dph(_require(tree, 'transmission', ''), 'transmission')
    computation = parse_dph(_require(tree, 'computation', ''), 'computation')
    vacation = parse_dph(_require(tree, 'vacation', ''), 'vacation')

    solver = tree.get('solver', {})
    _check_keys(solver, ('method', 'tail_eps', 'n_max'), 'solver')
    solver = SolverOptions(**solver)

    bounds = tree.get('bounds')
    if bounds is not None and not isinstance(bounds, list):
        raise ConfigurationError("expected a list of delay bounds", path='bounds')

    sweep = None
    if 'sweep' in tree:
        sweep_tree = tree['sweep']
        _check_keys(sweep_tree, ('mu1', 's1', 'variants'), 'sweep')
        mu1 = _vector(_require(sweep_tree, 'mu1', 'sweep'), 'sweep.mu1')
        s1 = sweep_tree.get('s1')
        s1 = None if s1 is None else _vector(s1, 'sweep.s1')
        variants = sweep_tree.get('variants', {})
        _check_keys(variants, list(variants), 'sweep.variants')
        variants = dict((name, parse_dph(value, 'sweep.variants.%s' % name))
                        for name, value in variants.items())
        sweep = Sweep(mu1, s1, variants)

    pmf = None
    if 'pmf' in tree:
        _check_keys(tree['pmf'], ('mu1', ), 'pmf')
        pmf = _vector(_require(tree['pmf'], 'mu1', 'pmf'), 'pmf.mu1')

    simulation = tree.get('simulation', {})
    _check_keys(simulation, ('seed', 'confidence', 'relative_accuracy', 'warmup', 'max_slots',
                             'segment_slots', 'policy'), 'simulation')
    simulation = SimulationSettings(**simulation)

    return ScenarioConfig(arrival, transmission, computation, vacation, n1, n2,
                          name=tree.get('name'), slot_ms=tree.get('slot_ms'), solver=solver,
                          bounds=bounds, sweep=sweep, pmf=pmf, simulation=simulation)


def dumps_config(config):
    """Return a scenario serialized as a JSON string."""
    return json.dumps(config.to_dict(), indent=2, sort_keys=True)


def loads_config(text, extension='.json'):
    """Parse a scenario document given as a string."""
    try:
        if extension.lower() in YAML_EXTENSIONS:
            if yaml is None:
                raise ConfigurationError("reading YAML needs PyYAML; install tandemdelay[yaml]")
            tree = yaml.safe_load(text)
        else:
            tree = json.loads(text)
    except ValueError as err:
        raise ConfigurationError("not a valid JSON document: %s" % err)
    except Exception as err:
        if yaml is not None and isinstance(err, yaml.YAMLError):
            raise ConfigurationError("not a valid YAML document: %s" % err)
        raise
    return parse_config(tree)


def load_config(path):
    """
    Return the ScenarioConfig stored in a JSON or YAML file.

    """
    try:
        text = read(path)
    except (IOError, OSError, UnicodeDecodeError) as err:
        raise ConfigurationError("cannot read %s: %s" % (path, err))
    config = loads_config(text, os.path.splitext(path)[1])
    logger.debug("loaded scenario %r from %s", config.name, path)
    return config


def save_config(config, path):
    """Write a scenario as JSON."""
    with open(path, 'w') as f:
        f.write(dumps_config(config))
        f.write('\n')

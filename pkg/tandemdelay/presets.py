# coding: utf-8

"""
Exposes the embedded scenario presets.

Both cases share the arrival process (lambda = 0.5 tasks per slot), the
buffer sizes N1 = 10 and N2 = 15 and a 1 ms slot.  Case 1 transmits more
slowly than tasks arrive (mu1 = 0.3571); case 2 transmits faster
(mu1 = 0.8333) and has longer vacations.

"""

import copy

from tandemdelay.common import ConfigurationError
from tandemdelay.config import parse_config


ARRIVAL = {
    'd0': [[0.2359, 0.1938], [0.2792, 0.2805]],
    'd1': [[0.1236, 0.4467], [0.2644, 0.1759]],
}

# The transmission-rate grid and its order-1 transmission times S1 = 1 - mu1.
SWEEP_MU1 = [0.1429, 0.1786, 0.2381, 0.3571, 0.4, 0.4545, 0.5263, 0.625, 0.7692, 0.8333]
SWEEP_S1 = [0.8571, 0.8214, 0.7619, 0.6429, 0.6, 0.5455, 0.4737, 0.375, 0.2308, 0.1667]

PMF_MU1 = [0.1429, 0.3571, 0.5263]

# Computation rates mu2 = 0.4545 below the arrival rate and mu2 = 0.7143 above it.
HIGH_LOAD = {'alpha': [1.0], 't': [[0.5455]]}
LOW_LOAD = {'alpha': [1.0], 't': [[0.2857]]}

VARIANT_HIGH_LOAD = 'lambda_gt_mu2'
VARIANT_LOW_LOAD = 'lambda_lt_mu2'

CASE1 = {
    'name': 'case1',
    'buffers': {'n1': 10, 'n2': 15},
    'slot_ms': 1.0,
    'arrival': ARRIVAL,
    'transmission': {'alpha': [1.0], 't': [[0.6429]]},
    'computation': HIGH_LOAD,
    'vacation': {'alpha': [0.6545, 0.3455],
                 't': [[0.3035, 0.0617], [0.6738, 0.1916]]},
    'bounds': [10, 20, 30, 40, 50, 60],
}

CASE2 = dict(CASE1, **{
    'name': 'case2',
    'transmission': {'alpha': [1.0], 't': [[0.1667]]},
    'vacation': {'alpha': [0.6969, 0.3031],
                 't': [[0.6378, 0.1007], [0.4613, 0.3278]]},
    'bounds': [10, 20, 30, 40, 50, 60, 70, 80],
})

SWEEP_HIGH_LOAD = dict(CASE1, **{
    'name': 'sweep-high-load',
    'sweep': {'mu1': SWEEP_MU1, 's1': SWEEP_S1, 'variants': {VARIANT_HIGH_LOAD: HIGH_LOAD}},
})

SWEEP_LOW_LOAD = dict(CASE1, **{
    'name': 'sweep-low-load',
    'computation': LOW_LOAD,
    'sweep': {'mu1': SWEEP_MU1, 's1': SWEEP_S1, 'variants': {VARIANT_LOW_LOAD: LOW_LOAD}},
})

PMF_FIGS = dict(CASE1, **{
    'name': 'pmf-figs',
    'sweep': {'mu1': SWEEP_MU1, 's1': SWEEP_S1,
              'variants': {VARIANT_HIGH_LOAD: HIGH_LOAD, VARIANT_LOW_LOAD: LOW_LOAD}},
    'pmf': {'mu1': PMF_MU1},
})

PRESETS = {
    'case1': CASE1,
    'case2': CASE2,
    'sweep-high-load': SWEEP_HIGH_LOAD,
    'sweep-low-load': SWEEP_LOW_LOAD,
    'pmf-figs': PMF_FIGS,
}


def preset_names():
    return sorted(PRESETS)


def get_preset_tree(name):
    """Return a copy of a preset's JSON tree."""
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        raise ConfigurationError("unknown preset %r; choose from %s" %
                                 (name, ', '.join(preset_names())), path='preset')


def get_preset(name):
    """
    Return the ScenarioConfig of an embedded preset.

    >>> get_preset('case1').n2
    15

    """
    return parse_config(get_preset_tree(name))

# encoding: utf-8

"""
This module contains the initialization logic called by __init__.py.

"""

from tandemdelay.analyzer import Analyzer
from tandemdelay.config import ScenarioConfig, load_config
from tandemdelay.models import DMap, DPh
from tandemdelay.presets import get_preset
from tandemdelay.simulator import SimConfig
from tandemdelay.simulator import simulate as _simulate


def analyze(config, **kwargs):
    """
    Return the DelayCharacteristics of the given ScenarioConfig.

    Keyword arguments are passed to the Analyzer constructor.

    """
    analyzer = Analyzer(**kwargs)
    return analyzer.analyze(config)


def simulate(config, workers=None, **settings):
    """
    Return the SimEstimates of the given ScenarioConfig.

    Keyword arguments other than workers override the scenario's
    simulation settings (seed, confidence, max_slots, ...).

    """
    if settings:
        config = config.with_simulation(**settings)
    return _simulate(SimConfig(config, workers=workers))

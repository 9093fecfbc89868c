"""
End-to-end delay analysis of offloaded tasks in a two-queue tandem.

"""

# We keep all initialization code in a separate module.

from tandemdelay.init import analyze, simulate, Analyzer, DMap, DPh, ScenarioConfig
from tandemdelay.init import get_preset, load_config

__all__ = ['analyze', 'simulate', 'Analyzer', 'DMap', 'DPh', 'ScenarioConfig',
           'get_preset', 'load_config']

__version__ = '0.1.0'  # Also change in setup.py.

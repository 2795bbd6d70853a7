"""
Emerging-word detection in time-sliced corpora.

Words of a slowly emerging topic are flagged when their frequency and their
movement in an incrementally updated embedding space become strongly
anti-correlated. A controlled-injection harness makes detection measurable.
"""

from .emergence_monitor import EmergenceMonitor
from .experiment_service import ExperimentService, ExperimentError
from .config_loader import ConfigLoader, RunConfig

__all__ = ['EmergenceMonitor', 'ExperimentService', 'ExperimentError', 'ConfigLoader', 'RunConfig']

from .trajectories import TrajectorySeries, build_trajectories
from .base_detector import Alert, BaseDetector
from .correlation_detector import CorrelationDetector, ThresholdMode, WindowPoints
from .tfidf_detector import TfidfDetector

__all__ = [
    'TrajectorySeries',
    'build_trajectories',
    'Alert',
    'BaseDetector',
    'CorrelationDetector',
    'ThresholdMode',
    'WindowPoints',
    'TfidfDetector',
]

"""
Emerging-word detection from the rank correlation between a word's frequency
and its movement in the embedding space.

A word whose frequency keeps rising while its vector settles down (movement
falling) gets a strongly negative correlation; it is flagged when that
correlation drops below a threshold k, fixed or derived per slice from the
distribution of correlations over the vocabulary.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata

from ..corpus import TimeSlicedCorpus
from .base_detector import Alert, BaseDetector
from .trajectories import TrajectorySeries

logger = logging.getLogger(__name__)

DEFAULT_Z = 1.96


class ThresholdMode(Enum):
    FIXED = "fixed"
    ADAPTIVE = "adaptive"


class WindowPoints(Enum):
    """
    Which samples a window ending at slice t correlates.

    N: the n movements ending at t, each paired with the frequency at its later
       endpoint (slices t-n+1 .. t); first window at t = n.
    N_PLUS_ONE: slices t-n .. t inclusive; first window at t = n + 1.
    """

    N = "n"
    N_PLUS_ONE = "n_plus_one"

    def first_time(self, n: int) -> int:
        return n if self is WindowPoints.N else n + 1

    def columns(self, t: int, n: int) -> Tuple[slice, slice]:
        start = t - n + 1 if self is WindowPoints.N else t - n
        return slice(start, t + 1), slice(start - 1, t)


@dataclass(frozen=True)
class CorrelationRecord:
    word: str
    time: int
    rho: float
    window: int
    valid: bool


def movement(v_t: np.ndarray, v_prev: np.ndarray) -> float:
    """
    Euclidean distance between two vectors of one word.

    Raises:
        ValueError: If the dimensions differ
    """
    v_t = np.asarray(v_t, dtype=np.float64)
    v_prev = np.asarray(v_prev, dtype=np.float64)
    if v_t.shape != v_prev.shape:
        raise ValueError(f"Dimension mismatch: {v_t.shape} vs {v_prev.shape}")
    return float(np.linalg.norm(v_t - v_prev))


def spearman_rows(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Row-wise Spearman correlation with average ranks for ties.

    Args:
        x, y: Arrays of shape (rows, samples)

    Returns:
        (rho, valid); rho is 0 where invalid, i.e. where either row is constant
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if x.shape != y.shape:
        raise ValueError(f"Shape mismatch: {x.shape} vs {y.shape}")

    rx = rankdata(x, method="average", axis=1)
    ry = rankdata(y, method="average", axis=1)
    rx -= rx.mean(axis=1, keepdims=True)
    ry -= ry.mean(axis=1, keepdims=True)
    denom = np.sqrt((rx * rx).sum(axis=1) * (ry * ry).sum(axis=1))
    valid = (np.ptp(x, axis=1) > 0) & (np.ptp(y, axis=1) > 0)
    rho = np.zeros(x.shape[0])
    rho[valid] = (rx * ry).sum(axis=1)[valid] / denom[valid]
    return np.clip(rho, -1.0, 1.0), valid


def spearman(x: Sequence[float], y: Sequence[float]) -> Tuple[float, bool]:
    rho, valid = spearman_rows(np.asarray(x)[None, :], np.asarray(y)[None, :])
    return float(rho[0]), bool(valid[0])


def spearman_window(
    freq: Sequence[float],
    move: Sequence[float],
    t: int,
    n: int,
    points: WindowPoints = WindowPoints.N,
    word: str = "",
) -> Optional[CorrelationRecord]:
    """
    Correlation of one word's series over the window ending at t.

    Args:
        freq: Frequency series f^0 .. f^(T-1)
        move: Movement series indexed by its later endpoint (move[s-1] = d^s)
        t: Last slice of the window
        n: Window size
        points: Window convention

    Returns:
        The record, or None when the history before t is insufficient
    """
    freq = np.asarray(freq, dtype=np.float64)
    move = np.asarray(move, dtype=np.float64)
    if n < 1 or t < points.first_time(n) or t >= freq.size or t - 1 >= move.size:
        return None
    f_cols, m_cols = points.columns(t, n)
    rho, valid = spearman(freq[f_cols], move[m_cols])
    return CorrelationRecord(word=word, time=t, rho=rho, window=n, valid=valid)


def correlation_steps(
    trajectories: TrajectorySeries, n: int, points: WindowPoints = WindowPoints.N
) -> Iterator[Tuple[int, np.ndarray, np.ndarray]]:
    """
    Yield (t, rho, valid) over the vocabulary for every slice with enough history.
    """
    for t in range(points.first_time(n), trajectories.n_slices):
        f_cols, m_cols = points.columns(t, n)
        rho, valid = spearman_rows(trajectories.freq[:, f_cols], trajectories.move[:, m_cols])
        yield t, rho, valid


def whole_span_correlations(trajectories: TrajectorySeries) -> Tuple[np.ndarray, np.ndarray]:
    """Correlation of every word over its whole history (t = T-1, n = T-1)."""
    T = trajectories.n_slices
    if T < 3:
        raise ValueError("Whole-span correlation needs at least 3 slices")
    f_cols, m_cols = WindowPoints.N.columns(T - 1, T - 1)
    return spearman_rows(trajectories.freq[:, f_cols], trajectories.move[:, m_cols])


def adaptive_threshold(rhos: Sequence[float], z: float = DEFAULT_Z) -> Optional[float]:
    """
    k = mean(rho) - z * std(rho) over the valid correlations of one slice.

    The standard deviation uses the population formula.

    Returns:
        k, or None when fewer than two correlations are given
    """
    values = np.asarray(rhos, dtype=np.float64)
    if values.size < 2:
        return None
    return float(values.mean() - z * values.std())


def detect(
    trajectories: TrajectorySeries,
    n: int,
    mode: ThresholdMode = ThresholdMode.ADAPTIVE,
    fixed_k: Optional[float] = None,
    z: float = DEFAULT_Z,
    points: WindowPoints = WindowPoints.N,
) -> Tuple[List[Alert], Dict[int, float]]:
    """
    Alert on every (word, t) whose valid correlation is below k(t).

    Args:
        trajectories: Frequency and movement series
        n: Window size (>= 2)
        mode: Fixed or adaptive threshold
        fixed_k: Threshold for the fixed mode
        z: Quantile multiplier for the adaptive mode

    Returns:
        (alerts ordered by (t, word), threshold used at each slice)

    Raises:
        ValueError: If n < 2 or the fixed mode has no fixed_k
    """
    if n < 2:
        raise ValueError(f"Window size must be >= 2, got {n}")
    if mode is ThresholdMode.FIXED and fixed_k is None:
        raise ValueError("Fixed threshold mode requires fixed_k")

    words = trajectories.words
    alerts: List[Alert] = []
    thresholds: Dict[int, float] = {}
    for t, rho, valid in correlation_steps(trajectories, n, points):
        if mode is ThresholdMode.ADAPTIVE:
            k = adaptive_threshold(rho[valid], z)
            if k is None:
                logger.debug("Slice %d: fewer than 2 valid correlations, no threshold", t)
                continue
        else:
            k = float(fixed_k)
        thresholds[t] = k
        hits = np.flatnonzero(valid & (rho < k))
        for i in sorted(hits, key=lambda i: words[i]):
            alerts.append(Alert(word=words[i], time=t, rho=float(rho[i]), threshold=k, mode=mode.value))
    logger.info("Correlation detector: %d alerts over %d slices", len(alerts), len(thresholds))
    return alerts, thresholds


class CorrelationDetector(BaseDetector):
    """
    Detector flagging words whose frequency/movement correlation falls below k.
    """

    name = "correlation"

    def __init__(
        self,
        corpus: TimeSlicedCorpus,
        trajectories: TrajectorySeries,
        window: int = 5,
        mode: ThresholdMode = ThresholdMode.ADAPTIVE,
        fixed_k: Optional[float] = None,
        z: float = DEFAULT_Z,
        points: WindowPoints = WindowPoints.N,
    ):
        """
        Initialize the correlation detector.

        Args:
            corpus: Time-sliced corpus under monitoring
            trajectories: Per-word frequency and movement series
            window: Sliding window size n
            mode: Fixed or adaptive threshold
            fixed_k: Threshold for the fixed mode
            z: Quantile multiplier for the adaptive mode
            points: Window convention
        """
        super().__init__(corpus, trajectories)
        self.window = window
        self.mode = mode
        self.fixed_k = fixed_k
        self.z = z
        self.points = points
        self.thresholds: Dict[int, float] = {}

    def detect(self) -> List[Alert]:
        alerts, self.thresholds = detect(
            self.trajectories, self.window, self.mode, self.fixed_k, self.z, self.points
        )
        return alerts

    def validate(self, alerts: Sequence[Alert]) -> bool:
        """
        Every alert must sit strictly below the finite threshold recorded for its slice.
        """
        for alert in alerts:
            k = self.thresholds.get(alert.time)
            if k is None or not np.isfinite(k) or alert.threshold != k or not alert.rho < k:
                return False
        return True

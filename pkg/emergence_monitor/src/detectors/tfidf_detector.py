"""
Baseline: alert on terms whose tf-idf in a slice crosses a per-slice quantile.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..corpus import TimeSlicedCorpus
from .base_detector import Alert, BaseDetector
from .trajectories import TrajectorySeries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TfidfSeries:
    """
    scores[w, t] = tf(w, t) * log((1 + m) / (1 + df(w, t))) with m = t + 1 slices
    observed so far, tf the relative term frequency in slice t and df the
    number of slices up to t containing w. Nothing after t is used.
    """

    words: Tuple[str, ...]
    scores: np.ndarray


def tfidf_series(corpus: TimeSlicedCorpus) -> TfidfSeries:
    counts = corpus.count_matrix()
    totals = corpus.token_totals()
    tf = np.zeros_like(counts)
    nonempty = totals > 0
    tf[:, nonempty] = counts[:, nonempty] / totals[nonempty]

    df = np.cumsum(counts > 0, axis=1)
    observed = np.arange(1, corpus.n_slices + 1)
    idf = np.log((1.0 + observed) / (1.0 + df))
    return TfidfSeries(words=corpus.vocab.words, scores=tf * idf)


def tfidf_detect(corpus: TimeSlicedCorpus, threshold_quantile: float = 0.99) -> Tuple[List[Alert], Dict[int, float]]:
    """
    At each slice, alert on words whose tf-idf strictly exceeds the given
    quantile of the slice's nonzero tf-idf scores.

    Returns:
        (alerts ordered by (t, word), threshold used at each slice)

    Raises:
        ValueError: If threshold_quantile is outside (0, 1)
    """
    if not 0.0 < threshold_quantile < 1.0:
        raise ValueError(f"threshold_quantile must be in (0, 1), got {threshold_quantile}")

    series = tfidf_series(corpus)
    alerts: List[Alert] = []
    thresholds: Dict[int, float] = {}
    for t in range(corpus.n_slices):
        scores = series.scores[:, t]
        nonzero = scores[scores > 0]
        if nonzero.size == 0:
            continue
        threshold = float(np.quantile(nonzero, threshold_quantile))
        thresholds[t] = threshold
        hits = np.flatnonzero(scores > threshold)
        for i in sorted(hits, key=lambda i: series.words[i]):
            alerts.append(Alert(
                word=series.words[i], time=t, rho=float(scores[i]),
                threshold=threshold, mode="tfidf",
            ))
    logger.info("TF-IDF baseline: %d alerts", len(alerts))
    return alerts, thresholds


class TfidfDetector(BaseDetector):
    """
    Threshold-crossing tf-idf baseline run under the same harness.
    """

    name = "tfidf"

    def __init__(self, corpus: TimeSlicedCorpus, trajectories: TrajectorySeries,
                 threshold_quantile: float = 0.99):
        super().__init__(corpus, trajectories)
        self.threshold_quantile = threshold_quantile
        self.thresholds: Dict[int, float] = {}

    def detect(self) -> List[Alert]:
        alerts, self.thresholds = tfidf_detect(self.corpus, self.threshold_quantile)
        return alerts

    def validate(self, alerts: Sequence[Alert]) -> bool:
        return all(
            alert.time in self.thresholds and alert.rho > self.thresholds[alert.time]
            for alert in alerts
        )

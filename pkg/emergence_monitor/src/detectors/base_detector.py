from abc import ABC, abstractmethod
import csv
import os
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Sequence

from ..corpus import TimeSlicedCorpus
from .trajectories import TrajectorySeries

ALERT_CSV_HEADER = ["word", "time", "rho", "threshold", "mode"]


@dataclass(frozen=True)
class Alert:
    """
    A detection event for one word at one slice.

    For correlation alerts ``rho`` is the windowed correlation and ``threshold``
    the k it fell below; for tf-idf alerts ``rho`` carries the score that
    exceeded ``threshold``.
    """

    word: str
    time: int
    rho: float
    threshold: float
    mode: str


class BaseDetector(ABC):
    """
    Base class for all emerging-word detectors.

    Each detector must implement:
    1. detect() - Emits the alerts for the monitored corpus
    2. validate() - Audits that emitted alerts satisfy the detector's rule
    """

    name = "detector"

    def __init__(self, corpus: TimeSlicedCorpus, trajectories: TrajectorySeries):
        """
        Initialize the detector with the simulated corpus and its trajectories.

        Args:
            corpus: Time-sliced corpus under monitoring
            trajectories: Per-word frequency and movement series of the corpus
        """
        self.corpus = corpus
        self.trajectories = trajectories
        self.thresholds: Dict[int, float] = {}

    @abstractmethod
    def detect(self) -> List[Alert]:
        """
        Run the detector over every slice.

        Returns:
            Alerts ordered by (time, word)
        """
        pass

    @abstractmethod
    def validate(self, alerts: Sequence[Alert]) -> bool:
        """
        Check that every alert satisfies this detector's decision rule.

        Args:
            alerts: Alerts to audit

        Returns:
            True if all alerts are consistent, False otherwise
        """
        pass

    def alert_counts(self, alerts: Sequence[Alert]) -> Dict[str, int]:
        """
        Helper method counting alerts per word.
        """
        return dict(Counter(alert.word for alert in alerts))

    def get_word_alerts(self, alerts: Sequence[Alert], word: str) -> List[Alert]:
        """
        Helper method to get all alerts raised for one word.
        """
        return [alert for alert in alerts if alert.word == word]


def write_alerts(alerts: Sequence[Alert], path: str) -> None:
    """Alert CSV with header word,time,rho,threshold,mode."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(ALERT_CSV_HEADER)
        for alert in alerts:
            writer.writerow([alert.word, alert.time, repr(alert.rho), repr(alert.threshold), alert.mode])


def read_alerts(path: str) -> List[Alert]:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Alert file {path} not found")
    with open(path, "r", encoding="utf-8", newline="") as f:
        return [
            Alert(
                word=row["word"],
                time=int(row["time"]),
                rho=float(row["rho"]),
                threshold=float(row["threshold"]),
                mode=row["mode"],
            )
            for row in csv.DictReader(f)
        ]

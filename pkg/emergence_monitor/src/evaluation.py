"""
Scoring of alert sets against the gold standard.

Precision/recall/F treat every word alerted at least once during the observation
period as detected. The ranking view orders the whole vocabulary by alert count
and summarizes it with a ROC curve and its area.
"""

import csv
import logging
import math
import os
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics import auc as trapezoid_auc
from sklearn.metrics import roc_curve

from .detectors.base_detector import Alert

logger = logging.getLogger(__name__)

TOP_DETECTED = 10


def f_measure(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def prf(detected: Iterable[str], gold: Iterable[str]) -> Tuple[float, float, float]:
    """
    Precision, recall and F-measure of a detected word set.

    Args:
        detected: Words alerted at least once
        gold: Target words

    Returns:
        (P, R, F); P is 0 when nothing was detected

    Raises:
        ValueError: If the gold set is empty
    """
    detected_set = set(detected)
    gold_set = set(gold)
    if not gold_set:
        raise ValueError("Gold set must not be empty")

    hits = len(detected_set & gold_set)
    precision = hits / len(detected_set) if detected_set else 0.0
    recall = hits / len(gold_set)
    return precision, recall, f_measure(precision, recall)


def alert_counts(alerts: Iterable[Alert]) -> Dict[str, int]:
    return dict(Counter(alert.word for alert in alerts))


def top_detected(counts: Mapping[str, int], k: int = TOP_DETECTED) -> List[Tuple[str, int]]:
    """Most alerted words, ties broken lexicographically."""
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:k]


def roc_auc(
    counts: Mapping[str, int], gold: Iterable[str], vocab: Sequence[str]
) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    ROC of the vocabulary ranked by alert count, gold words as positives.

    Words without alerts count 0. Equal counts form a single ROC step, so the
    curve does not depend on the order of tied words.

    Returns:
        (false positive rates, true positive rates, AUC); AUC is nan when the
        vocabulary holds only positives or only negatives

    Raises:
        ValueError: If a gold word is missing from the vocabulary
    """
    gold_set = set(gold)
    vocab_set = set(vocab)
    missing = sorted(gold_set - vocab_set)
    if missing:
        raise ValueError(f"{len(missing)} gold words are not in the vocabulary, e.g. '{missing[0]}'")

    y_true = np.array([word in gold_set for word in vocab], dtype=bool)
    scores = np.array([counts.get(word, 0) for word in vocab], dtype=np.float64)
    if y_true.all() or not y_true.any():
        logger.warning("ROC undefined: %d positives among %d words", int(y_true.sum()), y_true.size)
        return np.array([0.0, 1.0]), np.array([0.0, 1.0]), float("nan")

    fpr, tpr, _ = roc_curve(y_true, scores, drop_intermediate=False)
    return fpr, tpr, float(trapezoid_auc(fpr, tpr))


@dataclass
class RunResult:
    """Scores of one detector on one seeded simulation."""

    seed: int
    precision: float
    recall: float
    f_measure: float
    auc: float
    n_alerts: int
    n_detected: int
    top_detected: List[Tuple[str, int]] = field(default_factory=list)
    thresholds: Dict[int, float] = field(default_factory=dict)
    audit_passed: bool = True

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["auc"] = _finite_or_none(self.auc)
        data["top_detected"] = [{"word": w, "alerts": c} for w, c in self.top_detected]
        data["thresholds"] = {str(t): k for t, k in sorted(self.thresholds.items())}
        return data


def score_run(
    seed: int,
    alerts: Sequence[Alert],
    gold: Sequence[str],
    vocab: Sequence[str],
    thresholds: Optional[Mapping[int, float]] = None,
    audit_passed: bool = True,
) -> RunResult:
    counts = alert_counts(alerts)
    precision, recall, f = prf(counts, gold)
    _, _, area = roc_auc(counts, gold, vocab)
    return RunResult(
        seed=seed,
        precision=precision,
        recall=recall,
        f_measure=f,
        auc=area,
        n_alerts=len(alerts),
        n_detected=len(counts),
        top_detected=top_detected(counts),
        thresholds=dict(thresholds or {}),
        audit_passed=audit_passed,
    )


@dataclass
class EvalReport:
    """
    Mean-of-runs metrics for one method under one configuration.

    Means are arithmetic means of the per-run values, not pooled counts.
    """

    method: str
    config: Dict[str, Any]
    runs: List[RunResult]

    @property
    def precision(self) -> float:
        return float(np.mean([run.precision for run in self.runs]))

    @property
    def recall(self) -> float:
        return float(np.mean([run.recall for run in self.runs]))

    @property
    def f_measure(self) -> float:
        return float(np.mean([run.f_measure for run in self.runs]))

    @property
    def auc(self) -> float:
        values = [run.auc for run in self.runs if not math.isnan(run.auc)]
        return float(np.mean(values)) if values else float("nan")

    @property
    def audit_passed(self) -> bool:
        return all(run.audit_passed for run in self.runs)

    def detected_words(self) -> List[Tuple[str, int]]:
        """Alert counts summed over runs for the words each run ranked highest."""
        total: Counter = Counter()
        for run in self.runs:
            total.update(dict(run.top_detected))
        return top_detected(total)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "config": self.config,
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
            "auc": _finite_or_none(self.auc),
            "audit_passed": self.audit_passed,
            "detected_words": [{"word": w, "alerts": c} for w, c in self.detected_words()],
            "runs": [run.to_dict() for run in self.runs],
        }


COMBINED_CATEGORY = "all"


@dataclass
class CombinedReport:
    """
    One method under one (rate, window) setting, averaged over categories.

    Every metric is the mean of the per-category means.
    """

    method: str
    config: Dict[str, Any]
    parts: List[EvalReport]

    def _mean(self, metric: str) -> float:
        values = [getattr(part, metric) for part in self.parts]
        values = [value for value in values if not math.isnan(value)]
        return float(np.mean(values)) if values else float("nan")

    @property
    def precision(self) -> float:
        return self._mean("precision")

    @property
    def recall(self) -> float:
        return self._mean("recall")

    @property
    def f_measure(self) -> float:
        return self._mean("f_measure")

    @property
    def auc(self) -> float:
        return self._mean("auc")

    @property
    def audit_passed(self) -> bool:
        return all(part.audit_passed for part in self.parts)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "config": self.config,
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
            "auc": _finite_or_none(self.auc),
            "audit_passed": self.audit_passed,
            "categories": {
                part.config.get("category"): {
                    "precision": part.precision,
                    "recall": part.recall,
                    "f_measure": part.f_measure,
                    "auc": _finite_or_none(part.auc),
                }
                for part in self.parts
            },
        }


def combine_reports(reports: Sequence[EvalReport]) -> List[CombinedReport]:
    """
    Group per-category reports by (method, rate, window), in first-seen order.

    Raises:
        ValueError: If two reports of a group share a category
    """
    groups: Dict[Tuple[Any, Any, Any], List[EvalReport]] = {}
    for report in reports:
        key = (report.method, report.config.get("rate"), report.config.get("window"))
        groups.setdefault(key, []).append(report)

    combined = []
    for parts in groups.values():
        categories = [part.config.get("category") for part in parts]
        if len(set(categories)) != len(categories):
            raise ValueError(f"Duplicate category among reports of one setting: {categories}")
        config = dict(parts[0].config)
        config["category"] = COMBINED_CATEGORY
        config["categories"] = categories
        combined.append(CombinedReport(method=parts[0].method, config=config, parts=parts))
    return combined


def _finite_or_none(value: float) -> Optional[float]:
    return None if math.isnan(value) else value


METHOD_TABLE_HEADER = ["category", "rate", "window", "method", "precision", "recall", "f_measure", "auc"]


def write_method_table(reports: Sequence[Any], path: str) -> None:
    """Method x P/R/F table, one row per report (per-category or combined)."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(METHOD_TABLE_HEADER)
        for report in reports:
            auc_value = _finite_or_none(report.auc)
            writer.writerow([
                report.config.get("category"),
                report.config.get("rate"),
                report.config.get("window"),
                report.method,
                repr(report.precision),
                repr(report.recall),
                repr(report.f_measure),
                "" if auc_value is None else repr(auc_value),
            ])


def write_rate_table(reports: Sequence[Any], path: str) -> None:
    """
    Rate x F table: one row per (category, rate, window), one F column per method.
    """
    methods = sorted({report.method for report in reports})
    rows: Dict[Tuple[Any, Any, Any], Dict[str, float]] = {}
    for report in reports:
        key = (report.config.get("category"), report.config.get("rate"), report.config.get("window"))
        rows.setdefault(key, {})[report.method] = report.f_measure

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["category", "rate", "window"] + [f"f_{method}" for method in methods])
        for (category, rate, window), values in rows.items():
            writer.writerow(
                [category, rate, window] + ["" if m not in values else repr(values[m]) for m in methods]
            )

"""
Controlled injection of a held-out category as a simulated emerging topic.

The held-out category's documents are re-introduced over the slices of the base
corpus, either at a logistic introduction rate or, for the control group, on a
noisy uniform schedule.
"""

import json
import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .corpus import Document, TimeSlicedCorpus

logger = logging.getLogger(__name__)


class InjectionMode(Enum):
    """How the held-out category is re-introduced."""

    LOGISTIC = "logistic"  # centered logistic emergence
    CONTROL = "control"  # shuffled, noisy uniform introduction


@dataclass(frozen=True)
class LogisticSchedule:
    """
    Logistic introduction rate K / (1 + alpha * exp(-rate * t)) over T slices.

    Slice i maps to t = (i - T/2) * delta with delta = 2 * t_span / T, so the
    grid starts at -t_span and t = 0 falls on slice T/2.
    """

    K: float
    rate: float
    n_slices: int
    alpha: float = 1.0
    t_span: float = 10.0

    def __post_init__(self):
        if self.K <= 0:
            raise ValueError(f"K must be positive, got {self.K}")
        if self.rate <= 0:
            raise ValueError(f"rate must be positive, got {self.rate}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.n_slices < 1:
            raise ValueError(f"n_slices must be >= 1, got {self.n_slices}")
        if self.t_span <= 0:
            raise ValueError(f"t_span must be positive, got {self.t_span}")

    @property
    def delta(self) -> float:
        return 2.0 * self.t_span / self.n_slices

    def t_grid(self) -> np.ndarray:
        return (np.arange(self.n_slices) - self.n_slices / 2.0) * self.delta


@dataclass(frozen=True)
class InjectionPlan:
    """Per-slice injected document counts plus the shuffled document order."""

    counts: Tuple[int, ...]
    order: Tuple[int, ...]
    seed: int
    mode: InjectionMode
    rate: Optional[float] = None

    @property
    def total(self) -> int:
        return int(sum(self.counts))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "rate": self.rate,
            "mode": self.mode.value,
            "per_slice_counts": list(self.counts),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def logistic_volume(t: float, schedule: LogisticSchedule) -> float:
    """
    Injected volume per unit of time at real time t.

    Returns:
        K / (1 + alpha * exp(-rate * t))
    """
    # expit-style split keeps large |t| finite in both directions
    z = -schedule.rate * t
    if z > 0:
        ez = np.exp(-z)
        return float(schedule.K * ez / (ez + schedule.alpha))
    return float(schedule.K / (1.0 + schedule.alpha * np.exp(z)))


def _round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(values + 0.5).astype(np.int64)


def counts_from_cumulative(cumulative: Sequence[float]) -> List[int]:
    """
    Differences of the rounded cumulative volumes.

    Rounding the cumulative curve rather than each slice keeps the total equal
    to the rounded final volume.
    """
    rounded = _round_half_up(np.asarray(cumulative, dtype=np.float64))
    counts = np.diff(np.concatenate(([0], rounded)))
    return [int(c) for c in np.maximum(counts, 0)]


def plan_injection(
    category_docs: Sequence[Document], schedule: LogisticSchedule, rng_seed: int
) -> InjectionPlan:
    """
    Plan the logistic re-introduction of a category.

    Each slice receives a share of the category proportional to the logistic
    rate at its grid point, so per-slice volumes grow with t and the topic's
    frequency keeps increasing over the whole run. The running sum of those
    shares is rescaled to the category size and quantized by cumulative
    rounding.

    Args:
        category_docs: Documents of the held-out category
        schedule: Logistic schedule over the corpus slices
        rng_seed: Seed for the document shuffle

    Returns:
        InjectionPlan whose counts sum to len(category_docs)

    Raises:
        ValueError: If category_docs is empty
    """
    if not category_docs:
        raise ValueError("Cannot plan an injection without category documents")

    n_docs = len(category_docs)
    rates = np.array([logistic_volume(t, schedule) for t in schedule.t_grid()])
    if not rates.sum() > 0:
        # steep rate on a grid that never reaches t >= 0
        rates[-1] = 1.0
    cumulative = n_docs * np.cumsum(rates) / rates.sum()
    counts = counts_from_cumulative(cumulative)

    rng = np.random.default_rng(rng_seed)
    order = rng.permutation(n_docs)
    logger.debug("Logistic plan (rate=%s): %s", schedule.rate, counts)
    return InjectionPlan(
        counts=tuple(counts),
        order=tuple(int(i) for i in order),
        seed=rng_seed,
        mode=InjectionMode.LOGISTIC,
        rate=schedule.rate,
    )


def plan_control(
    category_docs: Sequence[Document],
    n_slices: int,
    rng_seed: int,
    noise_level: float = 0.5,
) -> InjectionPlan:
    """
    Plan a control-group introduction: shuffled documents on a noisy uniform signal.

    Each slice's base share total/T is scaled by a uniform factor in
    [1 - noise_level, 1 + noise_level] before renormalizing to the total.

    Raises:
        ValueError: If category_docs is empty or noise_level is outside [0, 1)
    """
    if not category_docs:
        raise ValueError("Cannot plan an injection without category documents")
    if not 0.0 <= noise_level < 1.0:
        raise ValueError(f"noise_level must be in [0, 1), got {noise_level}")
    if n_slices < 1:
        raise ValueError(f"n_slices must be >= 1, got {n_slices}")

    n_docs = len(category_docs)
    rng = np.random.default_rng(rng_seed)
    noise = rng.uniform(-noise_level, noise_level, size=n_slices)
    weights = (n_docs / n_slices) * (1.0 + noise)
    cumulative = n_docs * np.cumsum(weights) / weights.sum()
    counts = counts_from_cumulative(cumulative)
    order = rng.permutation(n_docs)
    return InjectionPlan(
        counts=tuple(counts),
        order=tuple(int(i) for i in order),
        seed=rng_seed,
        mode=InjectionMode.CONTROL,
    )


def hold_out(docs: Sequence[Document], category: str) -> Tuple[List[Document], List[Document]]:
    """
    Split documents into (base, held-out category) lists, keeping input order.

    Raises:
        ValueError: If no document belongs to the category
    """
    base = [doc for doc in docs if doc.category != category]
    held = [doc for doc in docs if doc.category == category]
    if not held:
        raise ValueError(f"Category '{category}' has no documents")
    return base, held


def apply_plan(
    base_corpus: TimeSlicedCorpus,
    plan: InjectionPlan,
    category_docs: Sequence[Document],
) -> TimeSlicedCorpus:
    """
    Append the planned category documents to the base corpus slices.

    Documents are taken in plan order and re-stamped with the slice they are
    injected into. The vocabulary is left untouched.

    Raises:
        ValueError: If the plan does not match the category documents or the
            base corpus already holds documents of the category
    """
    if len(plan.counts) != base_corpus.n_slices:
        raise ValueError(
            f"Plan covers {len(plan.counts)} slices but the corpus has {base_corpus.n_slices}"
        )
    if len(plan.order) != len(category_docs) or plan.total > len(category_docs):
        raise ValueError(
            f"Plan was made for {len(plan.order)} documents, got {len(category_docs)}"
        )
    categories = {doc.category for doc in category_docs}
    if any(doc.category in categories for doc in base_corpus.documents()):
        raise ValueError("Base corpus already contains documents of the held-out category")

    slices = [list(docs) for docs in base_corpus.slices]
    cursor = 0
    for t, count in enumerate(plan.counts):
        for k in plan.order[cursor:cursor + count]:
            slices[t].append(replace(category_docs[k], time_index=t))
        cursor += count

    return TimeSlicedCorpus(
        slices=slices,
        vocab=base_corpus.vocab,
        slice_granularity=base_corpus.slice_granularity,
    )

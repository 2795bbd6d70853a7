"""
Per-word frequency and movement series built from a corpus and its snapshots.
"""

import csv
import os
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from ..corpus import TimeSlicedCorpus
from ..embedding.snapshot import EmbeddingSnapshot


@dataclass(frozen=True)
class TrajectorySeries:
    """
    freq[w, t]: share of slice t's tokens that are word w.
    move[w, s - 1]: distance between w's vectors at slices s - 1 and s (s >= 1).
    """

    words: Tuple[str, ...]
    freq: np.ndarray
    move: np.ndarray

    def __post_init__(self):
        V, T = self.freq.shape
        if len(self.words) != V:
            raise ValueError(f"{len(self.words)} words for {V} frequency rows")
        if self.move.shape != (V, max(T - 1, 0)):
            raise ValueError(f"Movement shape {self.move.shape} does not match ({V}, {T - 1})")

    @property
    def n_slices(self) -> int:
        return self.freq.shape[1]

    def word_index(self) -> Dict[str, int]:
        return {word: i for i, word in enumerate(self.words)}


def relative_frequencies(corpus: TimeSlicedCorpus) -> np.ndarray:
    """Word counts divided by the slice's total token count; empty slices give 0."""
    counts = corpus.count_matrix()
    totals = corpus.token_totals()
    freq = np.zeros_like(counts)
    nonempty = totals > 0
    freq[:, nonempty] = counts[:, nonempty] / totals[nonempty]
    return freq


def movement_matrix(snapshots: Sequence[EmbeddingSnapshot]) -> np.ndarray:
    """Euclidean distance of every row between consecutive snapshots, shape (V, T - 1)."""
    if not snapshots:
        raise ValueError("At least one snapshot is required")
    V = snapshots[0].shape[0]
    move = np.zeros((V, len(snapshots) - 1))
    for s in range(1, len(snapshots)):
        if snapshots[s].shape != snapshots[s - 1].shape:
            raise ValueError(
                f"Snapshot {s} has shape {snapshots[s].shape}, expected {snapshots[s - 1].shape}"
            )
        move[:, s - 1] = np.linalg.norm(snapshots[s].matrix - snapshots[s - 1].matrix, axis=1)
    return move


def build_trajectories(
    corpus: TimeSlicedCorpus, snapshots: Sequence[EmbeddingSnapshot]
) -> TrajectorySeries:
    """
    Raises:
        ValueError: If there is not exactly one snapshot per slice
    """
    if len(snapshots) != corpus.n_slices:
        raise ValueError(f"{len(snapshots)} snapshots for {corpus.n_slices} slices")
    return TrajectorySeries(
        words=corpus.vocab.words,
        freq=relative_frequencies(corpus),
        move=movement_matrix(snapshots),
    )


def write_trajectories(trajectories: TrajectorySeries, path: str,
                       words: Iterable[str] = ()) -> None:
    """
    CSV ``word,time,freq,movement``; movement is empty at t = 0.

    Args:
        trajectories: Series to dump
        path: Output file
        words: Restrict the dump to these words (all words when empty)
    """
    index = trajectories.word_index()
    requested = list(words)
    if requested:
        selected = [index[w] for w in requested if w in index]
    else:
        selected = list(range(len(trajectories.words)))
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["word", "time", "freq", "movement"])
        for i in selected:
            word = trajectories.words[i]
            for t in range(trajectories.n_slices):
                move = "" if t == 0 else repr(float(trajectories.move[i, t - 1]))
                writer.writerow([word, t, repr(float(trajectories.freq[i, t])), move])


def read_trajectories(path: str) -> TrajectorySeries:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Trajectory file {path} not found")

    rows: Dict[str, List[Tuple[int, float, str]]] = {}
    with open(path, "r", encoding="utf-8", newline="") as f:
        for row in csv.DictReader(f):
            rows.setdefault(row["word"], []).append(
                (int(row["time"]), float(row["freq"]), row["movement"])
            )
    if not rows:
        raise ValueError(f"{path}: no trajectory rows")

    words = tuple(rows)
    T = max(t for series in rows.values() for t, _, _ in series) + 1
    freq = np.zeros((len(words), T))
    move = np.zeros((len(words), T - 1))
    for i, word in enumerate(words):
        for t, f_value, m_value in rows[word]:
            freq[i, t] = f_value
            if t > 0 and m_value:
                move[i, t - 1] = float(m_value)
    return TrajectorySeries(words=words, freq=freq, move=move)

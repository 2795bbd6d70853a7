"""
Cumulative symmetric co-occurrence counts and their shifted positive PMI transform.
"""

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import sparse

from ..corpus import Document, VocabMap

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CooccurrenceCounts:
    """Sparse symmetric V x V pair counts collected with a +/- window_size window."""

    matrix: sparse.csr_matrix
    window_size: int

    @classmethod
    def empty(cls, vocab_size: int, window_size: int = 5) -> "CooccurrenceCounts":
        if window_size < 1:
            raise ValueError(f"window_size must be >= 1, got {window_size}")
        return cls(
            matrix=sparse.csr_matrix((vocab_size, vocab_size), dtype=np.float64),
            window_size=window_size,
        )

    @property
    def vocab_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def marginals(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    @property
    def total_pair_mass(self) -> float:
        return float(self.matrix.sum())


@dataclass(frozen=True)
class SppmiMatrix:
    """Sparse SPPMI values; only strictly positive entries are stored."""

    matrix: sparse.csr_matrix
    shift: float

    @property
    def nnz(self) -> int:
        return self.matrix.nnz


def accumulate(
    counts: CooccurrenceCounts, slice_docs: Iterable[Document], vocab: VocabMap
) -> CooccurrenceCounts:
    """
    Add the co-occurrences of a slice to the running counts.

    Out-of-vocabulary tokens are removed first; every remaining token then
    contributes +1 for each neighbour within the window, in both directions.

    Returns:
        New counts; the input counts are left unchanged
    """
    rows, cols = [], []
    for doc in slice_docs:
        ids = vocab.indices(doc.tokens)
        for offset in range(1, counts.window_size + 1):
            if offset >= ids.size:
                break
            left, right = ids[:-offset], ids[offset:]
            rows.extend((left, right))
            cols.extend((right, left))

    if not rows:
        return counts

    row = np.concatenate(rows)
    col = np.concatenate(cols)
    V = counts.vocab_size
    added = sparse.coo_matrix((np.ones(row.size), (row, col)), shape=(V, V)).tocsr()
    added.sum_duplicates()
    return CooccurrenceCounts(matrix=(counts.matrix + added).tocsr(), window_size=counts.window_size)


def sppmi(counts: CooccurrenceCounts, s: float = 15.0) -> SppmiMatrix:
    """
    Shifted positive PMI: max(log(p(x,y) / (p(x) p(y))) - log(s), 0).

    Only pairs with a positive count are evaluated; everything else stays an
    implicit zero.

    Raises:
        ValueError: If the counts are empty or s < 1
    """
    if s < 1:
        raise ValueError(f"Shift s must be >= 1, got {s}")
    total = counts.total_pair_mass
    if total <= 0:
        raise ValueError("Cannot compute SPPMI without any co-occurrence")

    coo = counts.matrix.tocoo()
    marginals = counts.marginals
    pmi = np.log(coo.data * total / (marginals[coo.row] * marginals[coo.col]))
    values = pmi - np.log(s)
    keep = values > 0
    V = counts.vocab_size
    matrix = sparse.coo_matrix(
        (values[keep], (coo.row[keep], coo.col[keep])), shape=(V, V)
    ).tocsr()
    logger.debug("SPPMI: %d of %d pairs positive (s=%s)", matrix.nnz, coo.nnz, s)
    return SppmiMatrix(matrix=matrix, shift=float(s))

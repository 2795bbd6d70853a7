import logging
from typing import Optional, Sequence

import numpy as np

from ..corpus import Document, TimeSlicedCorpus, VocabMap
from .base_embedder import BaseEmbedder
from .cooccurrence import CooccurrenceCounts, accumulate, sppmi
from .factorization import procrustes_align, truncated_svd
from .snapshot import EmbeddingSnapshot, ModelTag

logger = logging.getLogger(__name__)


class SvdEmbedder(BaseEmbedder):
    """
    Embeddings from the truncated SVD of cumulative SPPMI matrices.

    Co-occurrences are accumulated from the first slice on; each new
    factorization is rotated onto the previous snapshot so that movement
    between slices is meaningful.
    """

    def __init__(
        self,
        vocab: VocabMap,
        dimension: int = 100,
        window_size: int = 5,
        seed: int = 0,
        shift: float = 15.0,
        factor_exponent: float = 0.5,
        exact_max_size: int = 500,
        n_oversamples: int = 10,
        n_iter: int = 4,
    ):
        """
        Args:
            vocab: Vocabulary fixed for the whole run
            dimension: Requested dimension; clamped to the vocabulary size
            window_size: Symmetric co-occurrence window
            seed: Seed of the randomized SVD
            shift: SPPMI shift s
            factor_exponent: Singular value weighting of the word vectors
            exact_max_size: Largest vocabulary factorized with a dense exact SVD
            n_oversamples: Randomized SVD oversampling
            n_iter: Randomized SVD power iterations
        """
        super().__init__(vocab, dimension, window_size, seed)
        if dimension > vocab.size:
            logger.warning("Dimension %d exceeds vocabulary size %d; clamping", dimension, vocab.size)
            self.dimension = vocab.size
        self.shift = shift
        self.factor_exponent = factor_exponent
        self.exact_max_size = exact_max_size
        self.n_oversamples = n_oversamples
        self.n_iter = n_iter
        self.counts: Optional[CooccurrenceCounts] = None
        self.previous: Optional[EmbeddingSnapshot] = None

    def initialize(self, corpus: TimeSlicedCorpus) -> None:
        self.counts = CooccurrenceCounts.empty(self.vocab.size, self.window_size)
        self.previous = None

    def update(self, slice_docs: Sequence[Document], time_index: int) -> EmbeddingSnapshot:
        if self.counts is None:
            raise ValueError("SvdEmbedder.update called before initialize")

        self.counts = accumulate(self.counts, slice_docs, self.vocab)
        if self.counts.total_pair_mass == 0:
            snapshot = self._zero_snapshot(time_index)
        else:
            matrix = sppmi(self.counts, self.shift)
            if matrix.nnz == 0:
                snapshot = self._zero_snapshot(time_index)
            else:
                snapshot = truncated_svd(
                    matrix,
                    min(self.dimension, self.vocab.size),
                    time_index=time_index,
                    exponent=self.factor_exponent,
                    exact_max_size=self.exact_max_size,
                    n_oversamples=self.n_oversamples,
                    n_iter=self.n_iter,
                    random_state=self.seed,
                )

        if self.previous is not None:
            snapshot = procrustes_align(snapshot, self.previous)
        self.previous = snapshot
        return snapshot

    def _zero_snapshot(self, time_index: int) -> EmbeddingSnapshot:
        logger.warning("Slice %d: SPPMI matrix is empty; emitting a zero snapshot", time_index)
        return EmbeddingSnapshot(
            matrix=np.zeros((self.vocab.size, self.dimension)),
            time_index=time_index,
            model_tag=ModelTag.SVD,
        )

from abc import ABC, abstractmethod
import logging
from typing import List, Sequence

from ..corpus import Document, TimeSlicedCorpus, VocabMap
from .snapshot import EmbeddingSnapshot

logger = logging.getLogger(__name__)


class BaseEmbedder(ABC):
    """
    Base class for all per-slice embedding models.

    Each embedder must implement:
    1. initialize() - Prepares the model state for a corpus
    2. update() - Consumes one slice and returns that slice's snapshot
    """

    def __init__(self, vocab: VocabMap, dimension: int = 100, window_size: int = 5, seed: int = 0):
        """
        Initialize the embedder with its fixed vocabulary and hyperparameters.

        Args:
            vocab: Vocabulary fixed for the whole run
            dimension: Requested embedding dimension D
            window_size: Symmetric co-occurrence window
            seed: Seed for any randomized step
        """
        if dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {dimension}")
        if window_size < 1:
            raise ValueError(f"window_size must be >= 1, got {window_size}")
        self.vocab = vocab
        self.dimension = dimension
        self.window_size = window_size
        self.seed = seed

    @abstractmethod
    def initialize(self, corpus: TimeSlicedCorpus) -> None:
        """
        Reset the model state before the first slice of ``corpus`` is consumed.
        """
        pass

    @abstractmethod
    def update(self, slice_docs: Sequence[Document], time_index: int) -> EmbeddingSnapshot:
        """
        Consume one slice and return the snapshot for ``time_index``.

        Args:
            slice_docs: Documents of the slice
            time_index: Index of the slice

        Returns:
            Snapshot consistent with the previously returned one
        """
        pass

    def embed_corpus(self, corpus: TimeSlicedCorpus) -> List[EmbeddingSnapshot]:
        """
        Produce one snapshot per slice, in slice order.
        """
        self.initialize(corpus)
        snapshots = []
        for t, docs in enumerate(corpus.slices):
            snapshots.append(self.update(docs, t))
            logger.debug("%s: slice %d embedded (%d docs)", self.__class__.__name__, t, len(docs))
        logger.info("%s: embedded %d slices", self.__class__.__name__, len(snapshots))
        return snapshots

"""
Incrementally trained skip-gram with negative sampling over a fixed vocabulary.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from gensim.models import Word2Vec

from ..corpus import Document, TimeSlicedCorpus, VocabMap
from .base_embedder import BaseEmbedder
from .snapshot import EmbeddingSnapshot, ModelTag

logger = logging.getLogger(__name__)


@dataclass
class SgnsState:
    """A gensim Word2Vec model plus the vocabulary order snapshots follow."""

    model: Word2Vec
    vocab: VocabMap
    row_order: np.ndarray
    epochs: int = 1

    def snapshot(self, time_index: int) -> EmbeddingSnapshot:
        return EmbeddingSnapshot(
            matrix=np.array(self.model.wv.vectors[self.row_order], dtype=np.float64),
            time_index=time_index,
            model_tag=ModelTag.SGNS,
        )


def _sentences(docs: Sequence[Document], vocab: VocabMap) -> List[List[str]]:
    # out-of-vocabulary tokens are removed before the window is applied
    sentences = [[tok for tok in doc.tokens if tok in vocab] for doc in docs]
    return [s for s in sentences if s]


def sgns_init(
    init_docs: Sequence[Document],
    vocab: VocabMap,
    dimension: int = 100,
    window_size: int = 5,
    negative: int = 5,
    alpha: float = 0.025,
    min_alpha: float = 0.0001,
    init_epochs: int = 5,
    epochs: int = 1,
    seed: int = 0,
    workers: int = 1,
) -> SgnsState:
    """
    Build the vocabulary-fixed model and train it on the initialization documents.

    Every vocabulary word is registered up front (with its corpus count, at
    least 1) so later updates never add words. Subsampling is disabled.
    ``workers=1`` is required for bit-identical reruns.

    Raises:
        ValueError: If init_docs holds no in-vocabulary token
    """
    sentences = _sentences(init_docs, vocab)
    if not sentences:
        raise ValueError("SGNS initialization needs documents with in-vocabulary tokens")

    counts = vocab.counts or (1,) * vocab.size
    model = Word2Vec(
        vector_size=dimension,
        window=window_size,
        sg=1,
        hs=0,
        negative=negative,
        alpha=alpha,
        min_alpha=min_alpha,
        sample=0,
        min_count=1,
        seed=seed,
        workers=workers,
    )
    model.build_vocab_from_freq({word: max(int(c), 1) for word, c in zip(vocab.words, counts)})
    model.train(sentences, total_examples=len(sentences), epochs=init_epochs)
    row_order = np.array([model.wv.key_to_index[word] for word in vocab.words], dtype=np.int64)
    logger.info("SGNS initialized on %d documents (%d epochs)", len(sentences), init_epochs)
    return SgnsState(model=model, vocab=vocab, row_order=row_order, epochs=epochs)


def sgns_update(state: SgnsState, slice_docs: Sequence[Document], time_index: int) -> EmbeddingSnapshot:
    """
    Continue training from the current weights on one slice.

    An empty slice leaves the weights untouched. No alignment is applied:
    continued training keeps the axes consistent.
    """
    sentences = _sentences(slice_docs, state.vocab)
    if sentences:
        state.model.train(sentences, total_examples=len(sentences), epochs=state.epochs)
    return state.snapshot(time_index)


class SgnsEmbedder(BaseEmbedder):
    """
    SGNS embedder: initialized on the first ``init_slices`` slices, then
    updated once per following slice. Slices consumed by the initialization
    all receive the initialized snapshot.
    """

    def __init__(
        self,
        vocab: VocabMap,
        dimension: int = 100,
        window_size: int = 5,
        seed: int = 0,
        negative: int = 5,
        alpha: float = 0.025,
        min_alpha: float = 0.0001,
        init_slices: int = 3,
        init_epochs: int = 5,
        epochs: int = 1,
        workers: int = 1,
    ):
        super().__init__(vocab, dimension, window_size, seed)
        if init_slices < 1:
            raise ValueError(f"init_slices must be >= 1, got {init_slices}")
        self.negative = negative
        self.alpha = alpha
        self.min_alpha = min_alpha
        self.init_slices = init_slices
        self.init_epochs = init_epochs
        self.epochs = epochs
        self.workers = workers
        self.state: Optional[SgnsState] = None

    def initialize(self, corpus: TimeSlicedCorpus) -> None:
        init_docs = [doc for docs in corpus.slices[:self.init_slices] for doc in docs]
        self.state = sgns_init(
            init_docs,
            self.vocab,
            dimension=self.dimension,
            window_size=self.window_size,
            negative=self.negative,
            alpha=self.alpha,
            min_alpha=self.min_alpha,
            init_epochs=self.init_epochs,
            epochs=self.epochs,
            seed=self.seed,
            workers=self.workers,
        )

    def update(self, slice_docs: Sequence[Document], time_index: int) -> EmbeddingSnapshot:
        if self.state is None:
            raise ValueError("SgnsEmbedder.update called before initialize")
        if time_index < self.init_slices:
            return self.state.snapshot(time_index)
        return sgns_update(self.state, slice_docs, time_index)

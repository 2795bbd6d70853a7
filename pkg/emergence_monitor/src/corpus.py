"""
Corpus ingestion: token normalization, bounded vocabulary and time slicing.
"""

import json
import logging
import os
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Document:
    """A tokenized text unit with its category label and time slice index."""

    id: str
    tokens: Tuple[str, ...]
    category: str
    time_index: int


@dataclass(frozen=True)
class VocabMap:
    """
    Bidirectional word <-> index mapping with dense indices in [0, V).

    Words are stored in index order; ``counts`` keeps the corpus frequency each
    word had when the vocabulary was built.
    """

    words: Tuple[str, ...]
    counts: Tuple[int, ...] = ()
    index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {word: i for i, word in enumerate(self.words)}
        if len(index) != len(self.words):
            raise ValueError("Vocabulary words must be unique")
        if self.counts and len(self.counts) != len(self.words):
            raise ValueError("Vocabulary counts must align with words")
        object.__setattr__(self, "index", index)

    @property
    def size(self) -> int:
        return len(self.words)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: object) -> bool:
        return word in self.index

    def word(self, idx: int) -> str:
        return self.words[idx]

    def indices(self, tokens: Iterable[str]) -> np.ndarray:
        """Map tokens to indices, dropping out-of-vocabulary tokens."""
        return np.fromiter(
            (self.index[tok] for tok in tokens if tok in self.index), dtype=np.int64
        )


@dataclass
class TimeSlicedCorpus:
    """Documents grouped per time slice, sharing one fixed vocabulary."""

    slices: List[List[Document]]
    vocab: VocabMap
    slice_granularity: str = "month"

    @property
    def n_slices(self) -> int:
        return len(self.slices)

    def documents(self) -> List[Document]:
        return [doc for docs in self.slices for doc in docs]

    def categories(self) -> List[str]:
        return sorted({doc.category for doc in self.documents()})

    def count_matrix(self) -> np.ndarray:
        """
        Word counts per slice.

        Returns:
            Array of shape (V, T); out-of-vocabulary tokens are ignored.
        """
        counts = np.zeros((self.vocab.size, self.n_slices), dtype=np.float64)
        for t, docs in enumerate(self.slices):
            for doc in docs:
                ids = self.vocab.indices(doc.tokens)
                if ids.size:
                    counts[:, t] += np.bincount(ids, minlength=self.vocab.size)
        return counts

    def token_totals(self) -> np.ndarray:
        """Total number of tokens (in and out of vocabulary) per slice."""
        return np.array(
            [sum(len(doc.tokens) for doc in docs) for docs in self.slices],
            dtype=np.float64,
        )


def _is_punctuation(char: str) -> bool:
    # Unicode punctuation (P*) and symbols (S*) such as $ or +
    return unicodedata.category(char)[0] in "PS"


def _is_numeral(token: str) -> bool:
    stripped = "".join(c for c in token if not _is_punctuation(c))
    return bool(stripped) and stripped.isdigit()


def normalize(raw_text: str, lemma_table: Optional[Dict[str, str]] = None) -> List[str]:
    """
    Lower-case, split on whitespace, strip edge punctuation or symbols, lemmatize.

    Tokens that are empty after stripping, or that are numerals (digits with at
    most interior punctuation such as ``1,000``), are dropped.

    Args:
        raw_text: Text to normalize
        lemma_table: Optional surface -> lemma mapping applied after lower-casing

    Returns:
        List of normalized tokens
    """
    tokens = []
    for piece in raw_text.lower().split():
        start, end = 0, len(piece)
        while start < end and _is_punctuation(piece[start]):
            start += 1
        while end > start and _is_punctuation(piece[end - 1]):
            end -= 1
        token = piece[start:end]
        if not token or _is_numeral(token):
            continue
        if lemma_table:
            token = lemma_table.get(token, token)
        tokens.append(token)
    return tokens


def build_vocabulary(docs: Iterable[Document], cap: int) -> VocabMap:
    """
    Keep the ``cap`` most frequent words; frequency ties break lexicographically.

    Args:
        docs: Documents to count
        cap: Maximum vocabulary size

    Returns:
        VocabMap with index 0 for the most frequent word

    Raises:
        ValueError: If cap < 1 or the documents hold no tokens
    """
    if cap < 1:
        raise ValueError(f"Vocabulary cap must be >= 1, got {cap}")

    counter: Counter = Counter()
    for doc in docs:
        counter.update(doc.tokens)
    if not counter:
        raise ValueError("Cannot build a vocabulary from documents without tokens")

    ranked = sorted(counter.items(), key=lambda item: (-item[1], item[0]))[:cap]
    logger.info("Vocabulary: kept %d of %d distinct words", len(ranked), len(counter))
    return VocabMap(
        words=tuple(word for word, _ in ranked),
        counts=tuple(count for _, count in ranked),
    )


def slice_by_time(
    docs: Iterable[Document],
    n_slices: int,
    vocab: Optional[VocabMap] = None,
    slice_granularity: str = "month",
) -> TimeSlicedCorpus:
    """
    Group documents by their time index, preserving input order inside a slice.

    Args:
        docs: Documents carrying a time_index in [0, n_slices)
        n_slices: Number of slices T
        vocab: Fixed vocabulary attached to the corpus (empty if omitted)
        slice_granularity: Label such as "month" or "year"

    Returns:
        TimeSlicedCorpus with exactly n_slices slices

    Raises:
        ValueError: If a document's time_index is out of range
    """
    if n_slices < 1:
        raise ValueError(f"Number of slices must be >= 1, got {n_slices}")

    slices: List[List[Document]] = [[] for _ in range(n_slices)]
    for doc in docs:
        if not 0 <= doc.time_index < n_slices:
            raise ValueError(
                f"Document {doc.id} has time_index {doc.time_index} outside [0, {n_slices})"
            )
        slices[doc.time_index].append(doc)
    return TimeSlicedCorpus(
        slices=slices,
        vocab=vocab if vocab is not None else VocabMap(words=()),
        slice_granularity=slice_granularity,
    )


def load_lemma_table(path: str) -> Dict[str, str]:
    """
    Reads a two-column ``surface<TAB>lemma`` file.

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If a non-empty line does not have exactly two columns
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Lemma table {path} not found")

    table = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{line_no}: expected 'surface<TAB>lemma'")
            table[parts[0].strip().lower()] = parts[1].strip().lower()
    return table


def read_documents(path: str, lemma_table: Optional[Dict[str, str]] = None) -> List[Document]:
    """
    Reads a JSONL corpus with fields id, text, category and time_index.

    Raises:
        FileNotFoundError: If the corpus file does not exist
        ValueError: If a line is not valid JSON or misses a required field
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Corpus file {path} not found")

    docs = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: invalid JSON ({exc.msg})") from exc
            for key in ("id", "text", "category", "time_index"):
                if key not in record:
                    raise ValueError(f"{path}:{line_no}: missing key '{key}'")
            time_index = record["time_index"]
            if isinstance(time_index, bool) or not isinstance(time_index, int) or time_index < 0:
                raise ValueError(f"{path}:{line_no}: time_index must be a non-negative integer")
            docs.append(
                Document(
                    id=str(record["id"]),
                    tokens=tuple(normalize(record["text"], lemma_table)),
                    category=str(record["category"]),
                    time_index=time_index,
                )
            )
    logger.info("Read %d documents from %s", len(docs), path)
    return docs


def write_documents(docs: Iterable[Document], path: str) -> None:
    """Writes documents as JSONL; tokens are joined with single spaces."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for doc in docs:
            record = {
                "id": doc.id,
                "text": " ".join(doc.tokens),
                "category": doc.category,
                "time_index": doc.time_index,
            }
            f.write(json.dumps(record, ensure_ascii=False) + "\n")


def write_vocab(vocab: VocabMap, path: str) -> None:
    """One word per line; the line number is the index."""
    with open(path, "w", encoding="utf-8") as f:
        for word in vocab.words:
            f.write(word + "\n")


def read_vocab(path: str) -> VocabMap:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Vocabulary file {path} not found")
    with open(path, "r", encoding="utf-8") as f:
        words = tuple(line.rstrip("\n") for line in f if line.rstrip("\n"))
    return VocabMap(words=words)

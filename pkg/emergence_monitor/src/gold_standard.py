"""
Gold standard: the most discriminative words of each category according to a
multinomial Naive Bayes classifier trained on the fully labeled corpus.
"""

import json
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from sklearn.naive_bayes import MultinomialNB

from .corpus import Document, TimeSlicedCorpus, VocabMap

logger = logging.getLogger(__name__)


@dataclass
class NBModel:
    """A fitted add-one smoothed multinomial Naive Bayes over a fixed vocabulary."""

    classifier: MultinomialNB
    vocab: VocabMap

    @property
    def categories(self) -> List[str]:
        return [str(c) for c in self.classifier.classes_]

    @property
    def class_log_prior(self) -> np.ndarray:
        return self.classifier.class_log_prior_

    @property
    def feature_log_prob(self) -> np.ndarray:
        """Log P(word | category), shape (n_categories, V)."""
        return self.classifier.feature_log_prob_

    @property
    def feature_count(self) -> np.ndarray:
        return self.classifier.feature_count_

    def category_index(self, category: str) -> int:
        try:
            return self.categories.index(category)
        except ValueError:
            raise ValueError(f"Unknown category '{category}'") from None


@dataclass
class GoldStandard:
    """Category -> ordered (word, score) pairs, most discriminative first."""

    entries: Dict[str, List[Tuple[str, float]]]
    training_accuracy: Optional[float] = None

    def words(self, category: str) -> List[str]:
        if category not in self.entries:
            raise ValueError(f"Gold standard has no entry for category '{category}'")
        return [word for word, _ in self.entries[category]]

    def to_dict(self) -> Dict[str, Any]:
        return {
            category: [{"word": word, "score": score} for word, score in pairs]
            for category, pairs in sorted(self.entries.items())
        }

    def save(self, path: str) -> None:
        """Writes ``{category: [{word, score}]}`` JSON."""
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2, ensure_ascii=False)
            f.write("\n")

    @classmethod
    def load(cls, path: str) -> "GoldStandard":
        if not os.path.exists(path):
            raise FileNotFoundError(f"Gold standard file {path} not found")
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        return cls(
            entries={
                category: [(item["word"], float(item["score"])) for item in items]
                for category, items in data.items()
            }
        )


def document_term_matrix(docs: Sequence[Document], vocab: VocabMap) -> sparse.csr_matrix:
    """Bag-of-words counts, one row per document; out-of-vocabulary tokens are ignored."""
    rows, cols = [], []
    for i, doc in enumerate(docs):
        ids = vocab.indices(doc.tokens)
        rows.append(np.full(ids.size, i, dtype=np.int64))
        cols.append(ids)
    row = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    col = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    data = np.ones(row.size, dtype=np.float64)
    matrix = sparse.coo_matrix((data, (row, col)), shape=(len(docs), vocab.size))
    return matrix.tocsr()


def train_nb(corpus: TimeSlicedCorpus, categories: Optional[Sequence[str]] = None) -> NBModel:
    """
    Fit a multinomial Naive Bayes with add-one smoothing on every corpus document.

    Args:
        corpus: Fully labeled corpus with its fixed vocabulary
        categories: Categories that must be present; defaults to those observed

    Returns:
        The trained NBModel

    Raises:
        ValueError: If the corpus is empty or a required category has no documents
    """
    docs = corpus.documents()
    if not docs:
        raise ValueError("Cannot train a classifier on an empty corpus")

    labels = np.array([doc.category for doc in docs])
    observed = set(labels.tolist())
    for category in categories or []:
        if category not in observed:
            raise ValueError(f"Category '{category}' has no documents")

    classifier = MultinomialNB(alpha=1.0, fit_prior=True)
    classifier.fit(document_term_matrix(docs, corpus.vocab), labels)
    logger.info("Trained Naive Bayes on %d documents, %d categories",
                len(docs), len(classifier.classes_))
    return NBModel(classifier=classifier, vocab=corpus.vocab)


def joint_log_likelihood(model: NBModel, docs: Sequence[Document]) -> np.ndarray:
    """Log prior plus summed token log likelihoods, shape (n_docs, n_categories)."""
    X = document_term_matrix(docs, model.vocab)
    return np.asarray(X @ model.feature_log_prob.T) + model.class_log_prior


def classify(model: NBModel, doc: Document) -> str:
    """
    Most probable category of a document.

    Categories are held in lexicographic order, so argmax returns the
    lexicographically first category among ties.
    """
    scores = joint_log_likelihood(model, [doc])[0]
    return model.categories[int(np.argmax(scores))]


def training_accuracy(model: NBModel, corpus: TimeSlicedCorpus) -> float:
    docs = corpus.documents()
    predicted = np.argmax(joint_log_likelihood(model, docs), axis=1)
    labels = np.array([model.category_index(doc.category) for doc in docs])
    return float(np.mean(predicted == labels))


def discriminative_scores(model: NBModel, category: str) -> np.ndarray:
    """
    Smoothed log-likelihood ratio of each word, category versus the rest.

    Raises:
        ValueError: If the model has a single category (no complement)
    """
    if len(model.categories) < 2:
        raise ValueError("Discriminative scores need at least two categories")

    c = model.category_index(category)
    counts = model.feature_count
    V = counts.shape[1]
    own = counts[c]
    rest = counts.sum(axis=0) - own
    log_own = np.log(own + 1.0) - np.log(own.sum() + V)
    log_rest = np.log(rest + 1.0) - np.log(rest.sum() + V)
    return log_own - log_rest


def _ranked(model: NBModel, category: str, k: int) -> List[Tuple[str, float]]:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    scores = discriminative_scores(model, category)
    words = np.array(model.vocab.words, dtype=object)
    order = sorted(range(len(words)), key=lambda i: (-scores[i], words[i]))[:k]
    return [(str(words[i]), float(scores[i])) for i in order]


def top_discriminative(model: NBModel, category: str, k: int = 100) -> List[str]:
    """
    The k most discriminative words of a category, ties broken lexicographically.

    Raises:
        ValueError: If k < 1, the category is unknown or there is no complement
    """
    return [word for word, _ in _ranked(model, category, k)]


def build_gold_standard(corpus: TimeSlicedCorpus, k: int = 100) -> GoldStandard:
    """
    Train on the labeled corpus and keep the top min(k, V) words of every category.
    """
    model = train_nb(corpus)
    accuracy = training_accuracy(model, corpus)
    logger.info("Naive Bayes training accuracy: %.3f", accuracy)
    entries = {
        category: _ranked(model, category, min(k, corpus.vocab.size))
        for category in model.categories
    }
    return GoldStandard(entries=entries, training_accuracy=accuracy)

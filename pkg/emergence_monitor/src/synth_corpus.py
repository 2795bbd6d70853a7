"""
Seeded synthetic labeled corpus.

Every category owns a lexical field of exclusive words; all categories share a
background vocabulary. Both are drawn from Zipf distributions, so the corpus has
realistic frequency structure while the true topical words are known.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from .corpus import Document

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SynthSpec:
    """
    Parameters of the synthetic corpus.

    ``mixture`` is the probability that a token comes from the document's
    category field rather than the background.
    """

    n_categories: int = 10
    vocab_size: int = 2000
    exclusive_words: int = 100
    background_words: int = 1000
    docs_per_category: int = 500
    tokens_per_doc: int = 80
    mixture: float = 0.4
    zipf_exponent: float = 1.1
    n_slices: int = 30
    seed: int = 0

    def validate(self) -> None:
        """
        Raises:
            ValueError: If a field is out of range or the vocabulary cannot hold
                every exclusive and background word
        """
        for name in ("n_categories", "exclusive_words", "background_words",
                     "docs_per_category", "tokens_per_doc", "n_slices"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        needed = self.n_categories * self.exclusive_words + self.background_words
        if self.vocab_size < needed:
            raise ValueError(
                f"vocab_size {self.vocab_size} is smaller than the {needed} exclusive and background words"
            )
        if not 0.0 < self.mixture <= 1.0:
            raise ValueError(f"mixture must be in (0, 1], got {self.mixture}")
        if self.zipf_exponent <= 0:
            raise ValueError(f"zipf_exponent must be positive, got {self.zipf_exponent}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SynthSpec":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"Unknown synth keys: {', '.join(unknown)}")
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def category_name(c: int) -> str:
    return f"cat{c:02d}"


def zipf_probabilities(n: int, exponent: float) -> np.ndarray:
    """P(rank k) proportional to k^-exponent for k = 1..n."""
    weights = np.arange(1, n + 1, dtype=np.float64) ** -exponent
    return weights / weights.sum()


def lexical_fields(spec: SynthSpec) -> Tuple[Dict[str, List[str]], List[str]]:
    """Exclusive words per category (in Zipf rank order) and the background words."""
    fields = {
        category_name(c): [f"{category_name(c)}w{j:03d}" for j in range(spec.exclusive_words)]
        for c in range(spec.n_categories)
    }
    background = [f"bg{j:04d}" for j in range(spec.background_words)]
    return fields, background


def generate(spec: SynthSpec) -> Tuple[List[Document], Dict[str, List[str]]]:
    """
    Generate the labeled corpus.

    Each document draws its own generator from a child of the generator seed, so
    documents are reproducible independently of each other. A document's slice
    is drawn uniformly.

    Returns:
        (documents ordered by category then number, true exclusive words per category)

    Raises:
        ValueError: If the generator settings are invalid
    """
    spec.validate()
    fields, background = lexical_fields(spec)
    background_arr = np.array(background, dtype=object)
    field_p = zipf_probabilities(spec.exclusive_words, spec.zipf_exponent)
    background_p = zipf_probabilities(spec.background_words, spec.zipf_exponent)

    n_docs = spec.n_categories * spec.docs_per_category
    children = np.random.SeedSequence(spec.seed).spawn(n_docs)

    docs: List[Document] = []
    for c in range(spec.n_categories):
        category = category_name(c)
        field_arr = np.array(fields[category], dtype=object)
        for k in range(spec.docs_per_category):
            rng = np.random.default_rng(children[c * spec.docs_per_category + k])
            from_field = rng.random(spec.tokens_per_doc) < spec.mixture
            n_field = int(from_field.sum())
            tokens = np.empty(spec.tokens_per_doc, dtype=object)
            tokens[from_field] = field_arr[rng.choice(spec.exclusive_words, size=n_field, p=field_p)]
            tokens[~from_field] = background_arr[
                rng.choice(spec.background_words, size=spec.tokens_per_doc - n_field, p=background_p)
            ]
            docs.append(Document(
                id=f"{category}-{k:05d}",
                tokens=tuple(str(tok) for tok in tokens),
                category=category,
                time_index=int(rng.integers(spec.n_slices)),
            ))

    logger.info("Generated %d synthetic documents in %d categories", len(docs), spec.n_categories)
    return docs, fields

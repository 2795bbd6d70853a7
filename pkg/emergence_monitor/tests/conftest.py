import copy

import pytest

from emergence_monitor.src.corpus import Document, VocabMap, build_vocabulary, slice_by_time


def make_doc(tokens, category="a", time_index=0, doc_id=None):
    """Document from a whitespace string or a token list."""
    if isinstance(tokens, str):
        tokens = tokens.split()
    return Document(
        id=doc_id or f"{category}-{time_index}-{' '.join(tokens)}",
        tokens=tuple(tokens),
        category=category,
        time_index=time_index,
    )


@pytest.fixture
def doc_factory():
    """Factory building documents from token strings."""
    return make_doc


@pytest.fixture
def two_category_docs():
    """Two categories with disjoint topical words and one shared word."""
    return [
        make_doc("film movie the", "arts", 0, "d0"),
        make_doc("movie director the", "arts", 1, "d1"),
        make_doc("film director film", "arts", 2, "d2"),
        make_doc("goal match the", "sports", 0, "d3"),
        make_doc("match team goal", "sports", 1, "d4"),
        make_doc("team the goal", "sports", 2, "d5"),
    ]


@pytest.fixture
def two_category_corpus(two_category_docs):
    """The two-category documents sliced over 3 slices with their full vocabulary."""
    vocab = build_vocabulary(two_category_docs, cap=100)
    return slice_by_time(two_category_docs, 3, vocab)


@pytest.fixture
def small_vocab():
    """Vocabulary of five letters."""
    return VocabMap(words=("a", "b", "c", "d", "e"))


SMALL_CONFIG = {
    "name": "test_small",
    "description": "Tiny synthetic configuration for service tests",
    "corpus": {
        "synth": {
            "n_categories": 3,
            "vocab_size": 90,
            "exclusive_words": 15,
            "background_words": 40,
            "docs_per_category": 30,
            "tokens_per_doc": 25,
            "mixture": 0.5,
            "n_slices": 10,
            "seed": 3,
        },
        "granularity": "year",
    },
    "embedding": {"model": "svd", "dimension": 6, "window_size": 2, "shift": 1},
    "detection": {"mode": "adaptive"},
    "injection": {"category": "cat01", "rates": [0.5]},
    "gold": {"top_k": 10},
    "seeds": [0, 1],
}


@pytest.fixture
def small_config(tmp_path):
    """Tiny synthetic configuration writing into a temporary directory."""
    config = copy.deepcopy(SMALL_CONFIG)
    config["output_dir"] = str(tmp_path / "run")
    return config

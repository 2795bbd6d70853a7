import math

import numpy as np
import pytest

from emergence_monitor.src.corpus import VocabMap, slice_by_time
from emergence_monitor.src.detectors import TfidfDetector, build_trajectories
from emergence_monitor.src.detectors.tfidf_detector import tfidf_detect, tfidf_series
from emergence_monitor.src.embedding.snapshot import EmbeddingSnapshot, ModelTag


@pytest.fixture
def burst_corpus(doc_factory):
    """Slices [a b], [a c], [a x x x b]: x bursts in the last slice."""
    docs = [
        doc_factory("a b", time_index=0, doc_id="0"),
        doc_factory("a c", time_index=1, doc_id="1"),
        doc_factory("a x x x b", time_index=2, doc_id="2"),
    ]
    return slice_by_time(docs, 3, VocabMap(words=("a", "b", "c", "x")))


class TestTfidfSeries:
    """Tests for causal tf-idf scores."""

    def test_scores(self, burst_corpus):
        scores = tfidf_series(burst_corpus).scores
        assert scores[3, 2] == pytest.approx(0.6 * math.log(4 / 2))
        assert scores[1, 2] == pytest.approx(0.2 * math.log(4 / 3))
        assert scores[1, 0] == pytest.approx(0.0)

    def test_word_in_every_slice_scores_zero(self, burst_corpus):
        np.testing.assert_allclose(tfidf_series(burst_corpus).scores[0], 0.0)

    def test_later_slices_do_not_change_earlier_scores(self, burst_corpus):
        prefix = type(burst_corpus)(slices=burst_corpus.slices[:2], vocab=burst_corpus.vocab)
        np.testing.assert_array_equal(
            tfidf_series(prefix).scores, tfidf_series(burst_corpus).scores[:, :2]
        )


class TestTfidfDetect:
    """Tests for the threshold-crossing baseline."""

    def test_burst_word_alerts(self, burst_corpus):
        alerts, thresholds = tfidf_detect(burst_corpus, 0.99)
        assert [(a.word, a.time) for a in alerts] == [("x", 2)]
        assert alerts[0].rho > thresholds[2]
        assert alerts[0].mode == "tfidf"

    def test_no_threshold_without_nonzero_scores(self, burst_corpus):
        _, thresholds = tfidf_detect(burst_corpus, 0.99)
        assert 0 not in thresholds

    @pytest.mark.parametrize("q", [0.0, 1.0])
    def test_invalid_quantile(self, burst_corpus, q):
        with pytest.raises(ValueError):
            tfidf_detect(burst_corpus, q)

    def test_detector_plugin(self, burst_corpus):
        snapshots = [
            EmbeddingSnapshot(matrix=np.zeros((4, 2)), time_index=t, model_tag=ModelTag.SVD) for t in range(3)
        ]
        detector = TfidfDetector(burst_corpus, build_trajectories(burst_corpus, snapshots), 0.99)
        alerts = detector.detect()
        assert detector.name == "tfidf"
        assert detector.validate(alerts)
        assert detector.alert_counts(alerts) == {"x": 1}

import numpy as np
import pytest

from emergence_monitor.src.corpus import VocabMap, slice_by_time
from emergence_monitor.src.detectors import TrajectorySeries, build_trajectories
from emergence_monitor.src.detectors.base_detector import Alert, read_alerts, write_alerts
from emergence_monitor.src.detectors.trajectories import (
    movement_matrix,
    read_trajectories,
    relative_frequencies,
    write_trajectories,
)
from emergence_monitor.src.embedding.snapshot import EmbeddingSnapshot, ModelTag


def snapshot(matrix, t):
    return EmbeddingSnapshot(matrix=np.asarray(matrix, dtype=np.float64), time_index=t, model_tag=ModelTag.SVD)


class TestTrajectories:
    """Tests for frequency and movement series."""

    def test_relative_frequencies(self, doc_factory):
        docs = [doc_factory("a a b oov", time_index=0), doc_factory("b", time_index=2)]
        corpus = slice_by_time(docs, 3, VocabMap(words=("a", "b")))
        np.testing.assert_allclose(relative_frequencies(corpus), [[0.5, 0.0, 0.0], [0.25, 0.0, 1.0]])

    def test_movement_matrix(self):
        move = movement_matrix([snapshot(np.zeros((2, 4)), 0), snapshot(np.ones((2, 4)), 1),
                                snapshot(np.ones((2, 4)), 2)])
        np.testing.assert_allclose(move, [[2.0, 0.0], [2.0, 0.0]])

    def test_movement_shape_mismatch(self):
        with pytest.raises(ValueError):
            movement_matrix([snapshot(np.zeros((2, 4)), 0), snapshot(np.zeros((2, 3)), 1)])

    def test_one_snapshot_per_slice(self, two_category_corpus):
        V = two_category_corpus.vocab.size
        with pytest.raises(ValueError):
            build_trajectories(two_category_corpus, [snapshot(np.zeros((V, 2)), 0)])

    def test_build(self, two_category_corpus):
        V = two_category_corpus.vocab.size
        trajectories = build_trajectories(
            two_category_corpus, [snapshot(np.zeros((V, 2)), t) for t in range(3)]
        )
        assert trajectories.freq.shape == (V, 3)
        assert trajectories.move.shape == (V, 2)
        np.testing.assert_allclose(trajectories.freq.sum(axis=0), 1.0)

    def test_shape_checks(self):
        with pytest.raises(ValueError):
            TrajectorySeries(words=("a",), freq=np.zeros((1, 3)), move=np.zeros((1, 3)))


class TestTrajectoryFiles:
    """Tests for the trajectory and alert CSV files."""

    def test_written_trajectories_read_back(self, tmp_path):
        rng = np.random.default_rng(0)
        trajectories = TrajectorySeries(words=("a", "b"), freq=rng.random((2, 4)), move=rng.random((2, 3)))
        path = tmp_path / "trajectories.csv"
        write_trajectories(trajectories, str(path))
        loaded = read_trajectories(str(path))
        assert loaded.words == ("a", "b")
        np.testing.assert_array_equal(loaded.freq, trajectories.freq)
        np.testing.assert_array_equal(loaded.move, trajectories.move)

    def test_movement_empty_at_first_slice(self, tmp_path):
        trajectories = TrajectorySeries(words=("a",), freq=np.ones((1, 2)), move=np.ones((1, 1)))
        path = tmp_path / "trajectories.csv"
        write_trajectories(trajectories, str(path))
        assert path.read_text(encoding="utf-8").splitlines() == [
            "word,time,freq,movement", "a,0,1.0,", "a,1,1.0,1.0",
        ]

    def test_word_filter(self, tmp_path):
        trajectories = TrajectorySeries(words=("a", "b"), freq=np.ones((2, 2)), move=np.ones((2, 1)))
        path = tmp_path / "trajectories.csv"
        write_trajectories(trajectories, str(path), words=["b", "missing"])
        assert read_trajectories(str(path)).words == ("b",)

    def test_alert_file(self, tmp_path):
        alerts = [Alert("w", 3, -0.9, -0.5, "adaptive"), Alert("x", 4, 0.3, 0.1, "tfidf")]
        path = tmp_path / "alerts.csv"
        write_alerts(alerts, str(path))
        assert path.read_text(encoding="utf-8").splitlines()[0] == "word,time,rho,threshold,mode"
        assert read_alerts(str(path)) == alerts

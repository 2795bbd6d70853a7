import logging
from typing import Any, Dict, List, Optional, Tuple, Type

from .corpus import TimeSlicedCorpus
from .detectors import BaseDetector, TrajectorySeries, build_trajectories
from .detectors.base_detector import Alert
from .embedding import BaseEmbedder, EmbeddingSnapshot

logger = logging.getLogger(__name__)


class EmergenceMonitor:
    """
    Monitors a time-sliced corpus for emerging words.

    The monitor embeds every slice with one embedder, derives the per-word
    frequency and movement trajectories, and runs each registered detector
    over them.
    """

    def __init__(self, corpus: TimeSlicedCorpus):
        """
        Initialize the monitor with the corpus to observe.

        Args:
            corpus: Time-sliced corpus with its fixed vocabulary
        """
        self.corpus = corpus
        self.embedder: Optional[BaseEmbedder] = None
        self.snapshots: List[EmbeddingSnapshot] = []
        self.trajectories: Optional[TrajectorySeries] = None
        self.detectors: List[BaseDetector] = []
        self._detector_specs: List[Tuple[Type[BaseDetector], Dict[str, Any]]] = []
        self.result_alerts: Optional[Dict[str, List[Alert]]] = None

    def set_embedder(self, embedder_class: Type[BaseEmbedder], **kwargs) -> None:
        """
        Choose the embedding model.

        Args:
            embedder_class: The embedder class to instantiate
            **kwargs: Additional arguments to pass to the embedder constructor
        """
        self.embedder = embedder_class(self.corpus.vocab, **kwargs)

    def add_detector(self, detector_class: Type[BaseDetector], **kwargs) -> None:
        """
        Register a detector; it is instantiated once the trajectories exist.

        Args:
            detector_class: The detector class to instantiate
            **kwargs: Additional arguments to pass to the detector constructor
        """
        self._detector_specs.append((detector_class, kwargs))

    def setup_model(self) -> None:
        """
        Embed every slice, build the trajectories and instantiate the detectors.

        Raises:
            ValueError: If no embedder was set
        """
        if self.embedder is None:
            raise ValueError("An embedder must be set before setup_model")

        self.snapshots = self.embedder.embed_corpus(self.corpus)
        self.trajectories = build_trajectories(self.corpus, self.snapshots)
        self.detectors = [
            detector_class(self.corpus, self.trajectories, **kwargs)
            for detector_class, kwargs in self._detector_specs
        ]

    def run(self) -> Dict[str, List[Alert]]:
        """
        Run every detector.

        Returns:
            Detector label -> alerts ordered by (time, word)
        """
        if self.trajectories is None:
            self.setup_model()

        results: Dict[str, List[Alert]] = {}
        for detector in self.detectors:
            alerts = detector.detect()
            results[self.label(detector)] = alerts
            logger.info("%s raised %d alerts on %d words",
                        self.label(detector), len(alerts), len(detector.alert_counts(alerts)))
        self.result_alerts = results
        return results

    def validate_alerts(self) -> Dict[str, bool]:
        """
        Audit the last alerts against their detectors' decision rules.

        Returns:
            Dictionary mapping detector labels to validation results (True/False)

        Raises:
            ValueError: If the detectors have not been run yet
        """
        if self.result_alerts is None:
            raise ValueError("No alerts to validate; call run() first")

        return {
            self.label(detector): detector.validate(self.result_alerts[self.label(detector)])
            for detector in self.detectors
        }

    def label(self, detector: BaseDetector) -> str:
        """Result key of a detector: its name, suffixed with the window when it has one."""
        window = getattr(detector, "window", None)
        return detector.name if window is None else f"{detector.name}_n{window}"

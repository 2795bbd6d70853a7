import copy
import hashlib
import json
import logging
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from joblib import Parallel, delayed

from .config_loader import ConfigLoader, DEFAULT_CONFIG_DIR, RunConfig
from .corpus import (
    Document,
    TimeSlicedCorpus,
    VocabMap,
    build_vocabulary,
    load_lemma_table,
    read_documents,
    slice_by_time,
    write_vocab,
)
from .detectors import CorrelationDetector, TfidfDetector, ThresholdMode, WindowPoints
from .detectors.base_detector import write_alerts
from .detectors.trajectories import write_trajectories
from .embedding import SgnsEmbedder, SvdEmbedder
from .embedding.snapshot import write_snapshot
from .emergence_monitor import EmergenceMonitor
from .evaluation import (
    COMBINED_CATEGORY,
    EvalReport,
    RunResult,
    combine_reports,
    score_run,
    write_method_table,
    write_rate_table,
)
from .gold_standard import GoldStandard, build_gold_standard
from .injection import (
    InjectionPlan,
    LogisticSchedule,
    apply_plan,
    hold_out,
    plan_control,
    plan_injection,
)
from .synth_corpus import generate

logger = logging.getLogger(__name__)

GOLD_FILE = "gold_standard.json"
GOLD_META_FILE = "gold_standard.meta.json"
MANIFEST_FILE = "manifest.json"


class ExperimentError(RuntimeError):
    """A pipeline failure annotated with the run it happened in."""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.context: Dict[str, Any] = dict(context or {})


def rate_label(rate: Optional[float]) -> str:
    return "control" if rate is None else f"rate_{rate:g}"


def run_path(category: str, rate: Optional[float], seed: int) -> str:
    """Directory of one simulation, relative to the output directory."""
    return os.path.join("runs", category, rate_label(rate), f"seed_{seed}")


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _dump_json(data: Any, path: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")


class ExperimentService:
    """
    Service that runs injection experiments from configuration data.

    The service loads the corpus described by the configuration, mints the gold
    standard on the labeled corpus, then re-injects each category under test for every (rate, seed) pair,
    embeds and monitors the simulated corpus and scores the alerts of every
    detector.

    The service can be initialized in two ways:
    1. With a configuration name or JSON file path
    2. With a direct configuration dictionary (for API/external calls)
    """

    def __init__(
        self,
        config_source: Union[str, Dict[str, Any]],
        config_dir: str = DEFAULT_CONFIG_DIR,
        overrides: Optional[Dict[str, Any]] = None,
    ):
        """
        Initialize the ExperimentService.

        Args:
            config_source: Either a configuration name/path (string) or a configuration dictionary
            config_dir: Directory containing configuration files (only used if config_source is a name)
            overrides: Flag-style overrides applied on top of the configuration

        Raises:
            FileNotFoundError: If the configuration or a file it references is missing
            ValueError: If the configuration is invalid
        """
        self.config_loader = ConfigLoader(config_dir)

        if isinstance(config_source, str):
            self.config = self.config_loader.load(config_source)
            self.config_name = self.config.get("name", config_source)
        else:
            self.config = copy.deepcopy(config_source)
            self.config_name = self.config.get("name", "direct_config")

        if overrides:
            self.config = self.config_loader.apply_overrides(self.config, overrides)
        self.config_loader.validate_configuration(self.config)
        self.run_config = RunConfig.from_dict(self.config)

        self._documents: Optional[List[Document]] = None
        self._vocab: Optional[VocabMap] = None

    def documents(self) -> List[Document]:
        """
        The labeled documents, generated or read once and cached.

        Raises:
            ValueError: If the corpus holds no documents
        """
        if self._documents is None:
            settings = self.run_config.corpus
            if settings.synth is not None:
                self._documents, _ = generate(settings.synth)
            else:
                lemma_table = load_lemma_table(settings.lemma_table) if settings.lemma_table else None
                self._documents = read_documents(settings.path, lemma_table)
            if not self._documents:
                raise ValueError("The corpus holds no documents")
        return self._documents

    @property
    def n_slices(self) -> int:
        settings = self.run_config.corpus
        if settings.synth is not None:
            return settings.synth.n_slices
        if settings.n_slices is not None:
            return settings.n_slices
        return max(doc.time_index for doc in self.documents()) + 1

    def vocabulary(self) -> VocabMap:
        if self._vocab is None:
            self._vocab = build_vocabulary(self.documents(), self.run_config.corpus.vocab_size)
        return self._vocab

    def labeled_corpus(self) -> TimeSlicedCorpus:
        return slice_by_time(
            self.documents(), self.n_slices, self.vocabulary(), self.run_config.corpus.granularity
        )

    def categories(self) -> List[str]:
        """
        Categories under test, in configuration order.

        Raises:
            ValueError: If none is configured or one is named like the combined view
        """
        categories = list(self.run_config.injection.categories)
        if not categories:
            raise ValueError("injection.category is required to run an experiment")
        if COMBINED_CATEGORY in categories:
            raise ValueError(f"'{COMBINED_CATEGORY}' is reserved for the combined reports")
        return categories

    def build_gold(self) -> GoldStandard:
        return build_gold_standard(self.labeled_corpus(), k=self.run_config.top_k)

    def write_gold(self, output_dir: Optional[str] = None,
                   gold: Optional[GoldStandard] = None) -> Dict[str, str]:
        """
        Build (unless given) and save the gold standard with its side file.

        Returns:
            Paths of the gold standard JSON and of the side file
        """
        output_dir = output_dir or self.run_config.output_dir
        gold = gold or self.build_gold()
        gold_path = os.path.join(output_dir, GOLD_FILE)
        meta_path = os.path.join(output_dir, GOLD_META_FILE)
        gold.save(gold_path)
        _dump_json({
            "training_accuracy": gold.training_accuracy,
            "top_k": self.run_config.top_k,
            "n_documents": len(self.documents()),
            "vocab_size": self.vocabulary().size,
            "categories": sorted(gold.entries),
        }, meta_path)
        logger.info("Gold standard written to %s", gold_path)
        return {"gold": gold_path, "meta": meta_path}

    def simulate(
        self, category: str, rate: Optional[float], seed: int
    ) -> Tuple[TimeSlicedCorpus, InjectionPlan]:
        """
        Hold out one category and re-inject it.

        Args:
            category: Category under test
            rate: Logistic rate; ignored in control mode
            seed: Seed of the document shuffle (and of the control noise)

        Returns:
            (simulated corpus, injection plan)
        """
        settings = self.run_config.injection
        base_docs, held = hold_out(self.documents(), category)
        base = slice_by_time(
            base_docs, self.n_slices, self.vocabulary(), self.run_config.corpus.granularity
        )
        if settings.mode == "control":
            plan = plan_control(held, self.n_slices, seed, settings.noise_level)
        else:
            schedule = LogisticSchedule(
                K=float(len(held)),
                rate=float(rate),
                n_slices=self.n_slices,
                alpha=settings.alpha,
                t_span=settings.t_span,
            )
            plan = plan_injection(held, schedule, seed)
        return apply_plan(base, plan, held), plan

    def build_monitor(self, corpus: TimeSlicedCorpus, seed: int, windows: Sequence[int]) -> EmergenceMonitor:
        """Monitor with the configured embedder, one correlation detector per window and the baseline."""
        embedding = self.run_config.embedding
        detection = self.run_config.detection
        monitor = EmergenceMonitor(corpus)

        if embedding.model == "sgns":
            sgns = embedding.sgns
            monitor.set_embedder(
                SgnsEmbedder,
                dimension=embedding.dimension,
                window_size=embedding.window_size,
                seed=seed,
                negative=sgns.negative,
                alpha=sgns.alpha,
                min_alpha=sgns.min_alpha,
                init_slices=sgns.init_slices,
                init_epochs=sgns.init_epochs,
                epochs=sgns.epochs,
            )
        else:
            monitor.set_embedder(
                SvdEmbedder,
                dimension=embedding.dimension,
                window_size=embedding.window_size,
                seed=seed,
                shift=embedding.shift,
                factor_exponent=embedding.factor_exponent,
                exact_max_size=embedding.exact_svd_max_vocab,
                n_oversamples=embedding.svd_oversamples,
                n_iter=embedding.svd_power_iterations,
            )

        for window in windows:
            monitor.add_detector(
                CorrelationDetector,
                window=window,
                mode=ThresholdMode(detection.mode),
                fixed_k=detection.fixed_k,
                z=detection.z,
                points=WindowPoints(detection.window_points),
            )
        if self.run_config.baseline_enabled:
            monitor.add_detector(TfidfDetector, threshold_quantile=self.run_config.tfidf_quantile)
        return monitor

    def run_seed(
        self,
        category: str,
        rate: Optional[float],
        seed: int,
        gold_words: Sequence[str],
        windows: Sequence[int],
        output_dir: str,
    ) -> Tuple[Dict[str, RunResult], List[str]]:
        """
        One simulation: inject, embed, detect, write the run artifacts and score.

        Returns:
            (detector label -> scores of this seed, paths of the files written)

        Raises:
            ExperimentError: Wrapping any failure, with category, rate, seed and stage
        """
        context: Dict[str, Any] = {
            "category": category,
            "rate": rate,
            "seed": seed,
            "stage": "inject",
        }
        run_dir = os.path.join(output_dir, run_path(category, rate, seed))
        written: List[str] = []
        try:
            corpus, plan = self.simulate(category, rate, seed)

            context["stage"] = "embed"
            monitor = self.build_monitor(corpus, seed, windows)
            monitor.setup_model()

            context["stage"] = "detect"
            results = monitor.run()
            audit = monitor.validate_alerts()

            context["stage"] = "write"
            path = os.path.join(run_dir, "plan.json")
            _dump_json(plan.to_dict(), path)
            written.append(path)
            path = os.path.join(run_dir, "trajectories.csv")
            write_trajectories(monitor.trajectories, path)
            written.append(path)
            for label, alerts in results.items():
                path = os.path.join(run_dir, f"alerts_{label}.csv")
                write_alerts(alerts, path)
                written.append(path)
            if self.run_config.save_snapshots:
                path = os.path.join(run_dir, "vocab.txt")
                write_vocab(corpus.vocab, path)
                written.append(path)
                for snapshot in monitor.snapshots:
                    path = os.path.join(run_dir, "snapshots", f"t{snapshot.time_index:03d}.snap")
                    write_snapshot(snapshot, path)
                    written.append(path)

            context["stage"] = "score"
            scores = {}
            for detector in monitor.detectors:
                label = monitor.label(detector)
                scores[label] = score_run(
                    seed,
                    results[label],
                    gold_words,
                    corpus.vocab.words,
                    thresholds=detector.thresholds,
                    audit_passed=audit[label],
                )
                if not audit[label]:
                    logger.warning("%s: alerts failed the audit (category=%s, rate=%s, seed=%d)",
                                   label, category, rate, seed)
                logger.info("%s %s rate=%s seed=%d: P=%.3f R=%.3f F=%.3f AUC=%.3f",
                            label, category, rate, seed,
                            scores[label].precision, scores[label].recall,
                            scores[label].f_measure, scores[label].auc)
            return scores, written
        except ExperimentError:
            raise
        except Exception as exc:
            raise ExperimentError(f"Stage '{context['stage']}' failed: {exc}", context) from exc

    def _config_echo(self, method: str, category: str, rate: Optional[float], window: int) -> Dict[str, Any]:
        rc = self.run_config
        echo = {
            "category": category,
            "rate": rate,
            "window": window,
            "model": rc.embedding.model,
            "dimension": rc.embedding.dimension,
            "injection_mode": rc.injection.mode,
            "seeds": list(rc.seeds),
        }
        if method == CorrelationDetector.name:
            echo["threshold_mode"] = rc.detection.mode
            echo["window_points"] = rc.detection.window_points
            if rc.detection.mode == "fixed":
                echo["fixed_k"] = rc.detection.fixed_k
        else:
            echo["tfidf_quantile"] = rc.tfidf_quantile
        return echo

    def run(self, output_dir: Optional[str] = None) -> Dict[str, Any]:
        """
        Run every (category, rate, seed) simulation and write reports, summary tables and the manifest.

        Returns:
            Dictionary containing:
            - output_dir: Where the artifacts were written
            - reports: One entry per (category, rate, window, method) with mean metrics and per-run details
            - combined: One entry per (rate, window, method) averaging the categories
            - manifest: Path of the manifest

        Raises:
            ValueError: If the configuration cannot be run (e.g. no category)
            ExperimentError: If a simulation fails
        """
        rc = self.run_config
        output_dir = output_dir or rc.output_dir
        categories = self.categories()

        gold = self.build_gold()
        written = list(self.write_gold(output_dir, gold).values())
        gold_words = {category: gold.words(category) for category in categories}

        windows = rc.detection.resolve_windows(self.n_slices)
        rates: List[Optional[float]] = [None] if rc.injection.mode == "control" else list(rc.injection.rates)
        jobs = [(category, rate, seed) for category in categories for rate in rates for seed in rc.seeds]
        logger.info("Running %d simulations for categories %s (windows %s)", len(jobs), categories, windows)

        if rc.workers > 1:
            outcomes = Parallel(n_jobs=rc.workers)(
                delayed(self.run_seed)(category, rate, seed, gold_words[category], windows, output_dir)
                for category, rate, seed in jobs
            )
        else:
            outcomes = [
                self.run_seed(category, rate, seed, gold_words[category], windows, output_dir)
                for category, rate, seed in jobs
            ]
        by_job = {}
        for job, (scores, paths) in zip(jobs, outcomes):
            by_job[job] = scores
            written.extend(paths)

        reports: List[EvalReport] = []
        for category in categories:
            for rate in rates:
                for window in windows:
                    methods = {}
                    for method, label in self._method_labels(window):
                        report = EvalReport(
                            method=method,
                            config=self._config_echo(method, category, rate, window),
                            runs=[by_job[(category, rate, seed)][label] for seed in rc.seeds],
                        )
                        reports.append(report)
                        methods[method] = report.to_dict()
                    path = os.path.join(output_dir, "reports", category, f"report_{rate_label(rate)}_n{window}.json")
                    _dump_json({"methods": methods}, path)
                    written.append(path)

        combined = combine_reports(reports)
        for rate in rates:
            for window in windows:
                methods = {
                    report.method: report.to_dict()
                    for report in combined
                    if report.config["rate"] == rate and report.config["window"] == window
                }
                path = os.path.join(output_dir, "reports", "combined", f"report_{rate_label(rate)}_n{window}.json")
                _dump_json({"methods": methods}, path)
                written.append(path)

        tables = {
            "summary_methods.csv": lambda path: write_method_table(reports, path),
            "summary_methods_combined.csv": lambda path: write_method_table(combined, path),
            "summary_rates.csv": lambda path: write_rate_table(list(reports) + list(combined), path),
        }
        for name, write in tables.items():
            path = os.path.join(output_dir, name)
            write(path)
            written.append(path)

        manifest_path = self._write_manifest(output_dir, categories, rates, written)
        return {
            "output_dir": output_dir,
            "reports": [report.to_dict() for report in reports],
            "combined": [report.to_dict() for report in combined],
            "manifest": manifest_path,
        }

    def _method_labels(self, window: int) -> List[Tuple[str, str]]:
        labels = [(CorrelationDetector.name, f"{CorrelationDetector.name}_n{window}")]
        if self.run_config.baseline_enabled:
            labels.append((TfidfDetector.name, TfidfDetector.name))
        return labels

    def _write_manifest(
        self,
        output_dir: str,
        categories: Sequence[str],
        rates: Sequence[Optional[float]],
        written: Sequence[str],
    ) -> str:
        """Inputs, seeds and the sha256 of every artifact this run wrote; no timestamps."""
        rc = self.run_config
        if rc.corpus.synth is not None:
            inputs: Dict[str, Any] = {"synth": rc.corpus.synth.to_dict()}
        else:
            inputs = {"corpus": {"path": rc.corpus.path, "sha256": file_sha256(rc.corpus.path)}}
            if rc.corpus.lemma_table:
                inputs["lemma_table"] = {
                    "path": rc.corpus.lemma_table, "sha256": file_sha256(rc.corpus.lemma_table)
                }

        files = {
            os.path.relpath(path, output_dir).replace(os.sep, "/"): file_sha256(path)
            for path in written
        }

        manifest = {
            "name": self.config_name,
            "categories": list(categories),
            "config": self.config,
            "seeds": list(rc.seeds),
            "inputs": inputs,
            "gold": GOLD_FILE,
            "runs": [
                {
                    "category": category,
                    "rate": rate,
                    "seed": seed,
                    "dir": run_path(category, rate, seed).replace(os.sep, "/"),
                }
                for category in categories for rate in rates for seed in rc.seeds
            ],
            "files": dict(sorted(files.items())),
        }
        path = os.path.join(output_dir, MANIFEST_FILE)
        _dump_json(manifest, path)
        return path

    @classmethod
    def list_available_configurations(
        cls, config_dir: str = DEFAULT_CONFIG_DIR
    ) -> List[str]:
        """
        List all available configuration names.

        Args:
            config_dir: Directory containing configuration files

        Returns:
            List of available configuration names
        """
        return ConfigLoader(config_dir).list_configurations()

    @classmethod
    def validate_configuration(cls, config: Dict[str, Any]) -> Dict[str, Any]:
        """
        Validate a configuration dictionary.

        Args:
            config: Configuration dictionary to validate

        Returns:
            Dictionary with validation results:
                - valid: Boolean indicating if the configuration is valid
                - errors: List of error messages (empty if valid)
        """
        try:
            ConfigLoader().validate_configuration(config)
            return {"valid": True, "errors": []}
        except (ValueError, FileNotFoundError) as e:
            return {"valid": False, "errors": [str(e)]}

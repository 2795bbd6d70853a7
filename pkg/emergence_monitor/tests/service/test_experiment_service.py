import copy
import csv
import json
import os

import pytest

from emergence_monitor.src.corpus import read_vocab
from emergence_monitor.src.detectors import CorrelationDetector, TfidfDetector
from emergence_monitor.src.detectors.base_detector import read_alerts
from emergence_monitor.src.embedding import SvdEmbedder
from emergence_monitor.src.embedding.snapshot import read_snapshot
from emergence_monitor.src.emergence_monitor import EmergenceMonitor
from emergence_monitor.src.experiment_service import (
    ExperimentError,
    ExperimentService,
    file_sha256,
    rate_label,
)
from emergence_monitor.src.gold_standard import GoldStandard

SEED_DIR = os.path.join("runs", "cat01", "rate_0.5", "seed_0")
REPORT = os.path.join("reports", "cat01", "report_rate_0.5_n3.json")


@pytest.fixture
def service(small_config):
    return ExperimentService(small_config)


@pytest.fixture
def completed_run(service):
    """The small configuration run once; returns (service, result)."""
    return service, service.run()


class TestExperimentServiceSetup:
    """Tests for service construction and corpus preparation."""

    def test_init_with_name(self):
        service = ExperimentService("synth_small")
        assert service.config_name == "synth_small"
        assert service.run_config.injection.categories == ("cat01",)

    def test_invalid_configuration(self, small_config):
        small_config["detection"]["window"] = 1
        with pytest.raises(ValueError):
            ExperimentService(small_config)

    def test_overrides_apply(self, small_config):
        service = ExperimentService(small_config, overrides={"rates": [0.3, 1.0], "seeds": [4]})
        assert service.run_config.injection.rates == (0.3, 1.0)
        assert service.run_config.seeds == (4,)

    def test_labeled_corpus(self, service):
        corpus = service.labeled_corpus()
        assert corpus.n_slices == 10
        assert len(corpus.documents()) == 90
        assert corpus.categories() == ["cat00", "cat01", "cat02"]

    def test_simulation_reinjects_the_whole_category(self, service):
        corpus, plan = service.simulate("cat01", 0.5, seed=0)
        injected = [d for d in corpus.documents() if d.category == "cat01"]
        assert len(injected) == plan.total == 30
        per_slice = [sum(d.category == "cat01" for d in docs) for docs in corpus.slices]
        assert per_slice == list(plan.counts)
        assert corpus.vocab == service.vocabulary()

    def test_category_required(self, small_config):
        del small_config["injection"]["category"]
        with pytest.raises(ValueError):
            ExperimentService(small_config).run()

    def test_unknown_category_reports_context(self, small_config, tmp_path):
        small_config["injection"]["category"] = "cat09"
        service = ExperimentService(small_config)
        with pytest.raises(ExperimentError) as info:
            service.run_seed("cat09", 0.5, 0, ["cat01w000"], [3], str(tmp_path))
        assert info.value.context == {"category": "cat09", "rate": 0.5, "seed": 0, "stage": "inject"}

    def test_rate_label(self):
        assert rate_label(None) == "control"
        assert rate_label(0.5) == "rate_0.5"
        assert rate_label(1.0) == "rate_1"

    def test_gold_files(self, service, tmp_path):
        paths = service.write_gold(str(tmp_path))
        gold = GoldStandard.load(paths["gold"])
        assert sorted(gold.entries) == ["cat00", "cat01", "cat02"]
        assert all(len(pairs) == 10 for pairs in gold.entries.values())
        with open(paths["meta"], encoding="utf-8") as f:
            meta = json.load(f)
        assert meta["n_documents"] == 90
        assert 0.0 <= meta["training_accuracy"] <= 1.0

    def test_class_helpers(self):
        assert "synth_small" in ExperimentService.list_available_configurations()
        assert ExperimentService.validate_configuration({"corpus": {}})["valid"] is False
        assert ExperimentService.validate_configuration({"corpus": {"synth": {}}}) == {"valid": True, "errors": []}


class TestExperimentRun:
    """Tests for complete runs of the small configuration."""

    def test_artifacts(self, completed_run):
        service, result = completed_run
        out = result["output_dir"]
        for rel in ["gold_standard.json", "gold_standard.meta.json", "manifest.json",
                    "summary_methods.csv", "summary_methods_combined.csv", "summary_rates.csv", REPORT,
                    os.path.join("reports", "combined", "report_rate_0.5_n3.json"),
                    os.path.join(SEED_DIR, "plan.json"), os.path.join(SEED_DIR, "trajectories.csv"),
                    os.path.join(SEED_DIR, "alerts_correlation_n3.csv"), os.path.join(SEED_DIR, "alerts_tfidf.csv")]:
            assert os.path.exists(os.path.join(out, rel)), rel
        assert not os.path.exists(os.path.join(out, SEED_DIR, "snapshots"))

    def test_reports(self, completed_run):
        _, result = completed_run
        reports = result["reports"]
        assert [(r["method"], r["config"]["rate"], r["config"]["window"]) for r in reports] == [
            ("correlation", 0.5, 3), ("tfidf", 0.5, 3),
        ]
        for report in reports:
            assert report["audit_passed"]
            assert [run["seed"] for run in report["runs"]] == [0, 1]
            assert 0.0 <= report["f_measure"] <= 1.0
            mean_f = sum(run["f_measure"] for run in report["runs"]) / 2
            assert report["f_measure"] == pytest.approx(mean_f)

    def test_report_file(self, completed_run):
        _, result = completed_run
        path = os.path.join(result["output_dir"], REPORT)
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
        assert sorted(data["methods"]) == ["correlation", "tfidf"]
        assert data["methods"]["correlation"]["config"]["threshold_mode"] == "adaptive"

    def test_alerts_obey_recorded_thresholds(self, completed_run):
        _, result = completed_run
        run = result["reports"][0]["runs"][0]
        thresholds = {int(t): k for t, k in run["thresholds"].items()}
        alerts = read_alerts(os.path.join(result["output_dir"], SEED_DIR, "alerts_correlation_n3.csv"))
        assert len(alerts) == run["n_alerts"]
        for alert in alerts:
            assert alert.rho < thresholds[alert.time]
        assert all(-3.0 < k <= 1.0 for k in thresholds.values())

    def test_plan_file(self, completed_run):
        _, result = completed_run
        with open(os.path.join(result["output_dir"], SEED_DIR, "plan.json"), encoding="utf-8") as f:
            plan = json.load(f)
        assert plan["seed"] == 0
        assert plan["rate"] == 0.5
        assert sum(plan["per_slice_counts"]) == 30

    def test_manifest(self, completed_run):
        _, result = completed_run
        out = result["output_dir"]
        with open(result["manifest"], encoding="utf-8") as f:
            manifest = json.load(f)
        assert manifest["categories"] == ["cat01"]
        assert manifest["seeds"] == [0, 1]
        assert manifest["inputs"]["synth"]["seed"] == 3
        assert [r["dir"] for r in manifest["runs"]] == ["runs/cat01/rate_0.5/seed_0", "runs/cat01/rate_0.5/seed_1"]
        assert {r["category"] for r in manifest["runs"]} == {"cat01"}
        assert "manifest.json" not in manifest["files"]
        for rel, digest in manifest["files"].items():
            assert file_sha256(os.path.join(out, rel)) == digest

    def test_summary_tables(self, completed_run):
        _, result = completed_run
        with open(os.path.join(result["output_dir"], "summary_rates.csv"), encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["category", "rate", "window", "f_correlation", "f_tfidf"]
        assert [row[:3] for row in rows[1:]] == [["cat01", "0.5", "3"], ["all", "0.5", "3"]]
        assert rows[1][3:] == rows[2][3:]

    def test_manifest_lists_only_this_run(self, small_config, tmp_path):
        out = tmp_path / "out"
        (out / "runs" / "cat02").mkdir(parents=True)
        (out / "notes.txt").write_text("kept by hand\n", encoding="utf-8")
        (out / "runs" / "cat02" / "stale.csv").write_text("word\n", encoding="utf-8")
        small_config["seeds"] = [0]
        result = ExperimentService(small_config).run(str(out))
        with open(result["manifest"], encoding="utf-8") as f:
            files = json.load(f)["files"]
        assert "notes.txt" not in files
        assert "runs/cat02/stale.csv" not in files
        assert {"gold_standard.json", "gold_standard.meta.json", "summary_methods.csv",
                "summary_methods_combined.csv", "summary_rates.csv",
                "reports/cat01/report_rate_0.5_n3.json", "reports/combined/report_rate_0.5_n3.json",
                "runs/cat01/rate_0.5/seed_0/plan.json", "runs/cat01/rate_0.5/seed_0/trajectories.csv",
                "runs/cat01/rate_0.5/seed_0/alerts_correlation_n3.csv",
                "runs/cat01/rate_0.5/seed_0/alerts_tfidf.csv"} == set(files)

    def test_several_categories(self, small_config, tmp_path):
        small_config["injection"]["category"] = ["cat01", "cat02"]
        small_config["seeds"] = [0]
        result = ExperimentService(small_config).run(str(tmp_path / "out"))
        assert [(r["config"]["category"], r["method"]) for r in result["reports"]] == [
            ("cat01", "correlation"), ("cat01", "tfidf"), ("cat02", "correlation"), ("cat02", "tfidf"),
        ]
        for combined in result["combined"]:
            parts = [r for r in result["reports"] if r["method"] == combined["method"]]
            assert combined["config"]["category"] == "all"
            assert combined["config"]["categories"] == ["cat01", "cat02"]
            assert sorted(combined["categories"]) == ["cat01", "cat02"]
            assert combined["f_measure"] == pytest.approx(sum(p["f_measure"] for p in parts) / 2)
            assert combined["precision"] == pytest.approx(sum(p["precision"] for p in parts) / 2)

        out = result["output_dir"]
        assert os.path.exists(os.path.join(out, "runs", "cat02", "rate_0.5", "seed_0", "plan.json"))
        with open(os.path.join(out, "summary_methods_combined.csv"), encoding="utf-8", newline="") as f:
            rows = list(csv.DictReader(f))
        assert [(row["category"], row["method"]) for row in rows] == [("all", "correlation"), ("all", "tfidf")]
        with open(os.path.join(out, "summary_methods.csv"), encoding="utf-8", newline="") as f:
            assert {row["category"] for row in csv.DictReader(f)} == {"cat01", "cat02"}

    def test_combined_category_name_is_reserved(self, small_config):
        small_config["injection"]["category"] = ["cat01", "all"]
        with pytest.raises(ValueError):
            ExperimentService(small_config).run()

    def test_reruns_are_byte_identical(self, small_config, tmp_path):
        first = ExperimentService(small_config).run(str(tmp_path / "first"))
        second = ExperimentService(copy.deepcopy(small_config)).run(str(tmp_path / "second"))
        for rel in [os.path.join(SEED_DIR, "alerts_correlation_n3.csv"), os.path.join(SEED_DIR, "alerts_tfidf.csv"),
                    os.path.join("runs", "cat01", "rate_0.5", "seed_1", "alerts_correlation_n3.csv"),
                    REPORT, "summary_methods.csv", "manifest.json"]:
            with open(os.path.join(first["output_dir"], rel), "rb") as a, \
                    open(os.path.join(second["output_dir"], rel), "rb") as b:
                assert a.read() == b.read(), rel

    def test_control_mode(self, small_config):
        result = ExperimentService(small_config, overrides={"mode": "control"}).run()
        out = result["output_dir"]
        assert os.path.exists(os.path.join(out, "runs", "cat01", "control", "seed_1", "plan.json"))
        assert os.path.exists(os.path.join(out, "reports", "cat01", "report_control_n3.json"))
        assert all(r["config"]["rate"] is None for r in result["reports"])
        assert all(r["config"]["injection_mode"] == "control" for r in result["reports"])

    def test_several_windows_and_no_baseline(self, small_config):
        small_config["detection"]["window"] = [3, 4]
        small_config["baseline"] = {"enabled": False}
        result = ExperimentService(small_config).run()
        assert [(r["method"], r["config"]["window"]) for r in result["reports"]] == [
            ("correlation", 3), ("correlation", 4),
        ]

    def test_snapshots_saved_on_request(self, small_config):
        small_config["save_snapshots"] = True
        small_config["seeds"] = [0]
        result = ExperimentService(small_config).run()
        run_dir = os.path.join(result["output_dir"], SEED_DIR)
        vocab = read_vocab(os.path.join(run_dir, "vocab.txt"))
        names = sorted(os.listdir(os.path.join(run_dir, "snapshots")))
        assert names == [f"t{t:03d}.snap" for t in range(10)]
        snapshot = read_snapshot(os.path.join(run_dir, "snapshots", "t009.snap"))
        assert snapshot.shape == (vocab.size, 6)
        assert snapshot.time_index == 9

    def test_sgns_model(self, small_config):
        small_config["embedding"] = {"model": "sgns", "dimension": 6, "window_size": 2,
                                     "sgns": {"init_slices": 2, "init_epochs": 2}}
        small_config["seeds"] = [0]
        result = ExperimentService(small_config).run()
        assert all(r["audit_passed"] for r in result["reports"])
        assert result["reports"][0]["config"]["model"] == "sgns"


class TestInjectedWordDetection:
    """End-to-end detection of a logistically injected category on the small corpus."""

    def test_gold_word_alerts_while_volume_grows(self, small_config):
        small_config["detection"] = {"mode": "fixed", "fixed_k": 0.0, "window": 3,
                                     "window_points": "n_plus_one"}
        service = ExperimentService(small_config)
        gold_words = set(service.build_gold().words("cat01"))
        corpus, plan = service.simulate("cat01", 0.5, seed=0)
        first_injected = next(t for t, count in enumerate(plan.counts) if count > 0)
        # the logistic rate rises over the whole run, so every slice from the
        # first injection on belongs to the growth phase
        assert plan.counts[-1] >= plan.counts[first_injected]

        monitor = service.build_monitor(corpus, seed=0, windows=[3])
        monitor.setup_model()
        alerts = monitor.run()["correlation_n3"]
        assert monitor.validate_alerts()["correlation_n3"]

        growth_alerts = [a for a in alerts if a.word in gold_words and a.time >= first_injected]
        assert growth_alerts
        assert all(a.rho < 0.0 for a in growth_alerts)


class TestEmergenceMonitor:
    """Tests for the monitor orchestrating embedder and detectors."""

    def test_setup_requires_embedder(self, two_category_corpus):
        with pytest.raises(ValueError):
            EmergenceMonitor(two_category_corpus).setup_model()

    def test_validate_before_run(self, two_category_corpus):
        with pytest.raises(ValueError):
            EmergenceMonitor(two_category_corpus).validate_alerts()

    def test_run_labels_and_audit(self, two_category_corpus):
        monitor = EmergenceMonitor(two_category_corpus)
        monitor.set_embedder(SvdEmbedder, dimension=2, window_size=2, shift=1.0)
        monitor.add_detector(CorrelationDetector, window=2)
        monitor.add_detector(TfidfDetector, threshold_quantile=0.5)
        results = monitor.run()
        assert sorted(results) == ["correlation_n2", "tfidf"]
        assert len(monitor.snapshots) == 3
        assert monitor.trajectories.freq.shape == (two_category_corpus.vocab.size, 3)
        assert monitor.validate_alerts() == {"correlation_n2": True, "tfidf": True}

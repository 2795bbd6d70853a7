"""
Plot-ready series from a completed run directory.

Three tables are emitted: the whole-span correlation of every word split into
gold and other words, its mean per category with a combined row, and the
frequency/movement series of requested words. No chart is rendered.
"""

import csv
import json
import logging
import os
from collections import defaultdict
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from .detectors.correlation_detector import whole_span_correlations
from .detectors.trajectories import read_trajectories
from .evaluation import COMBINED_CATEGORY
from .experiment_service import GOLD_FILE, MANIFEST_FILE
from .gold_standard import GoldStandard

logger = logging.getLogger(__name__)

DISTRIBUTION_FILE = "correlation_distribution.csv"
SUMMARY_FILE = "correlation_summary.csv"
SERIES_FILE = "word_series.csv"
SKIPPED_FILE = "skipped_words.txt"

GROUPS = ("gold", "rest")


def load_manifest(run_dir: str) -> Dict[str, Any]:
    """
    Raises:
        FileNotFoundError: If the directory or its manifest does not exist
        ValueError: If the directory is empty
    """
    if not os.path.isdir(run_dir):
        raise FileNotFoundError(f"Run directory {run_dir} not found")
    if not os.listdir(run_dir):
        raise ValueError(f"Run directory {run_dir} is empty")
    path = os.path.join(run_dir, MANIFEST_FILE)
    if not os.path.exists(path):
        raise FileNotFoundError(f"Run directory {run_dir} has no {MANIFEST_FILE}; was the run completed?")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _trajectory_files(run_dir: str, manifest: Dict[str, Any]) -> List[Dict[str, Any]]:
    runs = []
    for run in manifest.get("runs", []):
        path = os.path.join(run_dir, run["dir"], "trajectories.csv")
        if not os.path.exists(path):
            raise FileNotFoundError(f"Missing trajectory dump {path}")
        runs.append({"category": run["category"], "rate": run["rate"], "seed": run["seed"], "path": path})
    if not runs:
        raise ValueError(f"Manifest of {run_dir} lists no runs")
    return runs


def write_correlation_distribution(run_dir: str, out_path: str, summary_path: Optional[str] = None) -> int:
    """
    Whole-span correlation of every word with a valid record, per run.

    Columns: category, rate, seed, word, group (gold | rest), rho. The optional
    summary has one row per (category, rate, group) with the count and mean
    rho, followed by the combined rows: the mean of the category means.

    Returns:
        Number of distribution rows written
    """
    manifest = load_manifest(run_dir)
    gold_standard = GoldStandard.load(os.path.join(run_dir, manifest.get("gold", GOLD_FILE)))
    gold = {category: set(gold_standard.words(category)) for category in manifest["categories"]}

    values: Dict[Tuple[str, Any, str], List[float]] = defaultdict(list)
    rows = 0
    os.makedirs(os.path.dirname(os.path.abspath(out_path)), exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["category", "rate", "seed", "word", "group", "rho"])
        for run in _trajectory_files(run_dir, manifest):
            trajectories = read_trajectories(run["path"])
            rho, valid = whole_span_correlations(trajectories)
            for i, word in enumerate(trajectories.words):
                if valid[i]:
                    group = "gold" if word in gold[run["category"]] else "rest"
                    writer.writerow([run["category"], run["rate"], run["seed"], word, group, repr(float(rho[i]))])
                    values[(run["category"], run["rate"], group)].append(float(rho[i]))
                    rows += 1
    logger.info("Correlation distribution: %d rows written to %s", rows, out_path)

    if summary_path is not None:
        _write_summary(values, manifest["categories"], summary_path)
    return rows


def _write_summary(values: Dict[Tuple[str, Any, str], List[float]], categories: List[str], path: str) -> None:
    rates = list(dict.fromkeys(rate for _, rate, _ in values))
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["category", "rate", "group", "n_words", "mean_rho"])
        for category in categories:
            for rate in rates:
                for group in GROUPS:
                    series = values.get((category, rate, group), [])
                    mean = repr(float(np.mean(series))) if series else ""
                    writer.writerow([category, rate, group, len(series), mean])
        for rate in rates:
            for group in GROUPS:
                means = [float(np.mean(values[(c, rate, group)])) for c in categories if values.get((c, rate, group))]
                n_words = sum(len(values.get((c, rate, group), [])) for c in categories)
                writer.writerow([COMBINED_CATEGORY, rate, group, n_words,
                                 repr(float(np.mean(means))) if means else ""])


def write_word_series(run_dir: str, words: Iterable[str], out_path: str, skipped_path: str) -> List[str]:
    """
    Frequency and movement series of the named words, per run.

    Words missing from the trajectories are listed one per line in the
    skipped-words sidecar instead of failing.

    Returns:
        The skipped words
    """
    manifest = load_manifest(run_dir)
    requested = list(dict.fromkeys(words))
    skipped: List[str] = []

    os.makedirs(os.path.dirname(os.path.abspath(out_path)), exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["category", "rate", "seed", "word", "time", "freq", "movement"])
        for run in _trajectory_files(run_dir, manifest):
            trajectories = read_trajectories(run["path"])
            index = trajectories.word_index()
            for word in requested:
                if word not in index:
                    if word not in skipped:
                        skipped.append(word)
                    continue
                i = index[word]
                for t in range(trajectories.n_slices):
                    move = "" if t == 0 else repr(float(trajectories.move[i, t - 1]))
                    writer.writerow([run["category"], run["rate"], run["seed"], word, t,
                                     repr(float(trajectories.freq[i, t])), move])

    with open(skipped_path, "w", encoding="utf-8") as f:
        for word in skipped:
            f.write(word + "\n")
    if skipped:
        logger.warning("Skipped %d unknown words (listed in %s)", len(skipped), skipped_path)
    return skipped


def plot_data(run_dir: str, words: Iterable[str] = (), output_dir: Optional[str] = None) -> Dict[str, str]:
    """
    Emit every plot-ready table for a run directory.

    Args:
        run_dir: Completed run directory (with a manifest)
        words: Words whose series are dumped
        output_dir: Destination (defaults to <run_dir>/plotdata)

    Returns:
        Paths of the written files
    """
    output_dir = output_dir or os.path.join(run_dir, "plotdata")
    paths = {
        "distribution": os.path.join(output_dir, DISTRIBUTION_FILE),
        "summary": os.path.join(output_dir, SUMMARY_FILE),
    }
    write_correlation_distribution(run_dir, paths["distribution"], paths["summary"])

    words = list(words)
    if words:
        paths["series"] = os.path.join(output_dir, SERIES_FILE)
        paths["skipped"] = os.path.join(output_dir, SKIPPED_FILE)
        write_word_series(run_dir, words, paths["series"], paths["skipped"])
    return paths

import copy
import json
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .synth_corpus import SynthSpec

DEFAULT_CONFIG_DIR = os.path.abspath(os.path.join(
    os.path.dirname(__file__),
    '..',
    'data',
    'configurations'
))

EMBEDDING_MODELS = ("svd", "sgns")
THRESHOLD_MODES = ("adaptive", "fixed")
WINDOW_POINTS = ("n", "n_plus_one")
INJECTION_MODES = ("logistic", "control")
INJECTION_KEYS = ("category", "rates", "alpha", "mode", "noise_level", "t_span")
FACTOR_EXPONENTS = (0.0, 0.5, 1.0)


@dataclass(frozen=True)
class CorpusSettings:
    path: Optional[str] = None
    synth: Optional[SynthSpec] = None
    lemma_table: Optional[str] = None
    vocab_size: int = 20000
    n_slices: Optional[int] = None
    granularity: str = "month"


@dataclass(frozen=True)
class SgnsSettings:
    negative: int = 5
    alpha: float = 0.025
    min_alpha: float = 0.0001
    init_slices: int = 3
    init_epochs: int = 5
    epochs: int = 1


@dataclass(frozen=True)
class EmbeddingSettings:
    model: str = "svd"
    dimension: int = 100
    window_size: int = 5
    shift: float = 15.0
    factor_exponent: float = 0.5
    exact_svd_max_vocab: int = 500
    svd_oversamples: int = 10
    svd_power_iterations: int = 4
    sgns: SgnsSettings = field(default_factory=SgnsSettings)


@dataclass(frozen=True)
class DetectionSettings:
    windows: Tuple[Optional[int], ...] = (None,)
    mode: str = "adaptive"
    fixed_k: float = -0.65
    z: float = 1.96
    window_points: str = "n"

    def resolve_windows(self, n_slices: int) -> List[int]:
        """Concrete window sizes; an unset window is 5, or 3 for corpora of at most 15 slices."""
        default = 3 if n_slices <= 15 else 5
        resolved = []
        for window in self.windows:
            value = default if window is None else window
            if value not in resolved:
                resolved.append(value)
        return resolved


@dataclass(frozen=True)
class InjectionSettings:
    categories: Tuple[str, ...] = ()
    rates: Tuple[float, ...] = (0.5,)
    alpha: float = 1.0
    mode: str = "logistic"
    noise_level: float = 0.5
    t_span: float = 10.0


@dataclass(frozen=True)
class RunConfig:
    """Typed view of a validated configuration."""

    name: str
    corpus: CorpusSettings
    description: str = ""
    embedding: EmbeddingSettings = field(default_factory=EmbeddingSettings)
    detection: DetectionSettings = field(default_factory=DetectionSettings)
    injection: InjectionSettings = field(default_factory=InjectionSettings)
    tfidf_quantile: float = 0.99
    baseline_enabled: bool = True
    top_k: int = 100
    seeds: Tuple[int, ...] = (0, 1, 2, 3, 4)
    output_dir: str = "runs"
    workers: int = 1
    save_snapshots: bool = False

    @classmethod
    def from_dict(cls, config: Dict[str, Any]) -> "RunConfig":
        """Build from a configuration dictionary that passed validate_configuration."""
        corpus = config["corpus"]
        synth = corpus.get("synth")
        embedding = dict(config.get("embedding", {}))
        sgns = SgnsSettings(**embedding.pop("sgns", {}))
        detection = dict(config.get("detection", {}))
        window = detection.pop("window", None)
        windows = tuple(window) if isinstance(window, list) else (window,)
        injection = dict(config.get("injection", {}))
        if "rates" in injection:
            injection["rates"] = tuple(float(r) for r in injection["rates"])
        category = injection.pop("category", None)
        if category is not None:
            injection["categories"] = (category,) if isinstance(category, str) else tuple(category)
        baseline = config.get("baseline", {})
        name = config.get("name", "direct_config")

        return cls(
            name=name,
            description=config.get("description", ""),
            corpus=CorpusSettings(
                path=corpus.get("path"),
                synth=SynthSpec.from_dict(synth) if synth is not None else None,
                lemma_table=corpus.get("lemma_table"),
                vocab_size=corpus.get("vocab_size", 20000),
                n_slices=corpus.get("n_slices"),
                granularity=corpus.get("granularity", "month"),
            ),
            embedding=EmbeddingSettings(sgns=sgns, **embedding),
            detection=DetectionSettings(windows=windows, **detection),
            injection=InjectionSettings(**injection),
            tfidf_quantile=baseline.get("tfidf_quantile", 0.99),
            baseline_enabled=baseline.get("enabled", True),
            top_k=config.get("gold", {}).get("top_k", 100),
            seeds=tuple(config.get("seeds", (0, 1, 2, 3, 4))),
            output_dir=config.get("output_dir", os.path.join("runs", name)),
            workers=config.get("workers", 1),
            save_snapshots=config.get("save_snapshots", False),
        )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["detection"]["windows"] = list(self.detection.windows)
        data["injection"]["rates"] = list(self.injection.rates)
        data["injection"]["categories"] = list(self.injection.categories)
        data["seeds"] = list(self.seeds)
        return data


class ConfigLoader:
    """Class for loading experiment configuration files."""

    SECTIONS = ("corpus", "embedding", "detection", "injection", "baseline", "gold")
    TOP_LEVEL_KEYS = SECTIONS + ("name", "description", "seeds", "output_dir", "workers", "save_snapshots")

    def __init__(self, config_dir: str = DEFAULT_CONFIG_DIR):
        """
        Initializes the ConfigLoader.

        Args:
            config_dir: Directory where the configuration files are stored
        """
        self.config_dir = config_dir

    def list_configurations(self) -> List[str]:
        """
        Lists all available configurations.

        Returns:
            Sorted names of available configurations
        """
        if not os.path.isdir(self.config_dir):
            return []
        config_files = [f for f in os.listdir(self.config_dir) if f.endswith('.json')]
        return sorted(os.path.splitext(f)[0] for f in config_files)

    def load_configuration_by_name(self, config_name: str) -> Dict[str, Any]:
        """
        Loads a configuration from a JSON file in the configuration directory.

        Args:
            config_name: Name of the configuration (without .json extension)

        Returns:
            Dictionary with the configuration, path keys made absolute

        Raises:
            FileNotFoundError: If the configuration file was not found
            json.JSONDecodeError: If the JSON file is not properly formatted
        """
        return self.load_configuration_file(os.path.join(self.config_dir, f"{config_name}.json"))

    def load_configuration_file(self, config_path: str) -> Dict[str, Any]:
        """
        Loads a configuration from an explicit JSON file path.

        Relative corpus paths are resolved against the file's directory.

        Raises:
            FileNotFoundError: If the configuration file was not found
            json.JSONDecodeError: If the JSON file is not properly formatted
        """
        if not os.path.exists(config_path):
            raise FileNotFoundError(f"Configuration file {config_path} not found")

        with open(config_path, 'r', encoding='utf-8') as f:
            config = json.load(f)

        config.setdefault("name", os.path.splitext(os.path.basename(config_path))[0])
        return self._resolve_paths(config, os.path.dirname(os.path.abspath(config_path)))

    def load(self, source: str) -> Dict[str, Any]:
        """Load by file path when ``source`` names an existing file, else by name."""
        if source.endswith(".json") or os.path.isfile(source):
            return self.load_configuration_file(source)
        return self.load_configuration_by_name(source)

    def apply_overrides(self, config: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
        """
        Apply command-line style overrides on a copy of the configuration; overrides win.

        Recognized keys: rates, mode, seeds, category, model, window, output_dir, workers.
        Keys with a None value are ignored.
        """
        config = copy.deepcopy(config)
        targets = {
            "rates": ("injection", "rates"),
            "mode": ("injection", "mode"),
            "category": ("injection", "category"),
            "model": ("embedding", "model"),
            "window": ("detection", "window"),
        }
        for key, value in overrides.items():
            if value is None:
                continue
            if key in targets:
                section, name = targets[key]
                config.setdefault(section, {})[name] = value
            elif key in ("seeds", "output_dir", "workers"):
                config[key] = value
            else:
                raise ValueError(f"Unknown override '{key}'")
        return config

    def validate_configuration(self, config: Dict[str, Any]) -> None:
        """
        Validates a configuration.

        Args:
            config: Dictionary with the configuration

        Raises:
            ValueError: If the configuration is invalid
            FileNotFoundError: If a referenced corpus or lemma file does not exist
        """
        if not isinstance(config, dict):
            raise ValueError("Configuration must be a JSON object")
        for key in config:
            if key not in self.TOP_LEVEL_KEYS:
                raise ValueError(f"Unknown configuration key '{key}'")
        if "corpus" not in config:
            raise ValueError("Configuration must contain the key 'corpus'")
        for section in self.SECTIONS:
            if section in config and not isinstance(config[section], dict):
                raise ValueError(f"'{section}' must be an object")

        self._validate_corpus(config["corpus"])
        self._validate_embedding(config.get("embedding", {}))
        self._validate_detection(config.get("detection", {}))
        self._validate_injection(config.get("injection", {}))

        baseline = config.get("baseline", {})
        quantile = baseline.get("tfidf_quantile", 0.99)
        if not _is_number(quantile) or not 0 < quantile < 1:
            raise ValueError(f"baseline.tfidf_quantile must be in (0, 1), got {quantile}")
        if not isinstance(baseline.get("enabled", True), bool):
            raise ValueError("baseline.enabled must be a boolean")

        _positive_int(config.get("gold", {}).get("top_k", 100), "gold.top_k")

        seeds = config.get("seeds", [0])
        if not isinstance(seeds, list) or not seeds or not all(_is_int(s) for s in seeds):
            raise ValueError("seeds must be a non-empty list of integers")
        if len(set(seeds)) != len(seeds):
            raise ValueError("seeds must be distinct")
        _positive_int(config.get("workers", 1), "workers")
        if not isinstance(config.get("save_snapshots", False), bool):
            raise ValueError("save_snapshots must be a boolean")

    def _validate_corpus(self, corpus: Dict[str, Any]) -> None:
        has_path = corpus.get("path") is not None
        has_synth = corpus.get("synth") is not None
        if has_path == has_synth:
            raise ValueError("corpus must define exactly one of 'path' or 'synth'")
        if has_path and not os.path.exists(corpus["path"]):
            raise FileNotFoundError(f"Corpus file {corpus['path']} not found")
        if corpus.get("lemma_table") is not None and not os.path.exists(corpus["lemma_table"]):
            raise FileNotFoundError(f"Lemma table {corpus['lemma_table']} not found")
        if has_synth:
            if not isinstance(corpus["synth"], dict):
                raise ValueError("corpus.synth must be an object")
            spec = SynthSpec.from_dict(corpus["synth"])
            try:
                spec.validate()
            except TypeError as exc:
                raise ValueError(f"corpus.synth has a value of the wrong type ({exc})") from exc
            if corpus.get("n_slices") not in (None, spec.n_slices):
                raise ValueError(
                    f"corpus.n_slices {corpus['n_slices']} conflicts with synth n_slices {spec.n_slices}"
                )
        _positive_int(corpus.get("vocab_size", 20000), "corpus.vocab_size")
        if corpus.get("n_slices") is not None:
            _positive_int(corpus["n_slices"], "corpus.n_slices")

    def _validate_embedding(self, embedding: Dict[str, Any]) -> None:
        model = embedding.get("model", "svd")
        if model not in EMBEDDING_MODELS:
            raise ValueError(f"embedding.model must be one of {EMBEDDING_MODELS}, got '{model}'")
        for key in ("dimension", "window_size", "exact_svd_max_vocab", "svd_power_iterations"):
            if key in embedding:
                _positive_int(embedding[key], f"embedding.{key}")
        if "svd_oversamples" in embedding and (not _is_int(embedding["svd_oversamples"]) or embedding["svd_oversamples"] < 0):
            raise ValueError("embedding.svd_oversamples must be a non-negative integer")
        shift = embedding.get("shift", 15.0)
        if not _is_number(shift) or shift < 1:
            raise ValueError(f"embedding.shift must be >= 1, got {shift}")
        exponent = embedding.get("factor_exponent", 0.5)
        if exponent not in FACTOR_EXPONENTS:
            raise ValueError(f"embedding.factor_exponent must be one of {FACTOR_EXPONENTS}, got {exponent}")

        sgns = embedding.get("sgns", {})
        if not isinstance(sgns, dict):
            raise ValueError("embedding.sgns must be an object")
        for key in sgns:
            if key not in SgnsSettings.__dataclass_fields__:
                raise ValueError(f"Unknown key 'embedding.sgns.{key}'")
        for key in ("negative", "init_slices", "init_epochs", "epochs"):
            if key in sgns:
                _positive_int(sgns[key], f"embedding.sgns.{key}")
        for key in ("alpha", "min_alpha"):
            if key in sgns and (not _is_number(sgns[key]) or sgns[key] <= 0):
                raise ValueError(f"embedding.sgns.{key} must be positive")
        for key in embedding:
            if key != "sgns" and key not in EmbeddingSettings.__dataclass_fields__:
                raise ValueError(f"Unknown key 'embedding.{key}'")

    def _validate_detection(self, detection: Dict[str, Any]) -> None:
        for key in detection:
            if key != "window" and key not in DetectionSettings.__dataclass_fields__:
                raise ValueError(f"Unknown key 'detection.{key}'")
        window = detection.get("window")
        windows = window if isinstance(window, list) else [window]
        if not windows:
            raise ValueError("detection.window must not be an empty list")
        for value in windows:
            if value is not None and (not _is_int(value) or value < 2):
                raise ValueError(f"detection.window must be an integer >= 2, got {value}")
        mode = detection.get("mode", "adaptive")
        if mode not in THRESHOLD_MODES:
            raise ValueError(f"detection.mode must be one of {THRESHOLD_MODES}, got '{mode}'")
        if not _is_number(detection.get("fixed_k", -0.65)):
            raise ValueError("detection.fixed_k must be a number")
        z = detection.get("z", 1.96)
        if not _is_number(z) or z < 0:
            raise ValueError(f"detection.z must be a non-negative number, got {z}")
        points = detection.get("window_points", "n")
        if points not in WINDOW_POINTS:
            raise ValueError(f"detection.window_points must be one of {WINDOW_POINTS}, got '{points}'")

    def _validate_injection(self, injection: Dict[str, Any]) -> None:
        for key in injection:
            if key not in INJECTION_KEYS:
                raise ValueError(f"Unknown key 'injection.{key}'")
        category = injection.get("category")
        if isinstance(category, list):
            if not category or not all(isinstance(c, str) and c for c in category):
                raise ValueError("injection.category must be a non-empty list of category names")
            if len(set(category)) != len(category):
                raise ValueError(f"injection.category lists a category twice: {category}")
        elif category is not None and not isinstance(category, str):
            raise ValueError("injection.category must be a string or a list of strings")
        rates = injection.get("rates", [0.5])
        if not isinstance(rates, list) or not rates:
            raise ValueError("injection.rates must be a non-empty list")
        for rate in rates:
            if not _is_number(rate) or rate <= 0:
                raise ValueError(f"injection.rates must be positive, got {rate}")
        alpha = injection.get("alpha", 1.0)
        if not _is_number(alpha) or alpha <= 0:
            raise ValueError(f"injection.alpha must be positive, got {alpha}")
        mode = injection.get("mode", "logistic")
        if mode not in INJECTION_MODES:
            raise ValueError(f"injection.mode must be one of {INJECTION_MODES}, got '{mode}'")
        noise = injection.get("noise_level", 0.5)
        if not _is_number(noise) or not 0 <= noise < 1:
            raise ValueError(f"injection.noise_level must be in [0, 1), got {noise}")
        t_span = injection.get("t_span", 10.0)
        if not _is_number(t_span) or t_span <= 0:
            raise ValueError(f"injection.t_span must be positive, got {t_span}")

    def _resolve_paths(self, config: Dict[str, Any], base_dir: str) -> Dict[str, Any]:
        corpus = config.get("corpus")
        if isinstance(corpus, dict):
            for key in ("path", "lemma_table"):
                if isinstance(corpus.get(key), str) and not os.path.isabs(corpus[key]):
                    corpus[key] = os.path.normpath(os.path.join(base_dir, corpus[key]))
        return config


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _positive_int(value: Any, key: str) -> None:
    if not _is_int(value) or value < 1:
        raise ValueError(f"{key} must be a positive integer, got {value}")

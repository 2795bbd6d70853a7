"""
Command line entry point: ``emergence-monitor {synth,gold,run,plotdata}``.

Failures exit non-zero with one JSON object on stderr:
``{"error": <message>, "type": <exception class>, "context": {...}}``.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from .config_loader import ConfigLoader, DEFAULT_CONFIG_DIR
from .corpus import write_documents
from .experiment_service import ExperimentService
from .plot_data import plot_data
from .synth_corpus import SynthSpec, generate

logger = logging.getLogger(__name__)


class CliArgumentError(Exception):
    pass


class JsonArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as an exception so they end up as error JSON."""

    def error(self, message: str):
        raise CliArgumentError(message)


def _csv_list(cast):
    def parse(value: str) -> List[Any]:
        try:
            return [cast(item.strip()) for item in value.split(",") if item.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid list '{value}'") from None
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = JsonArgumentParser(
        prog="emergence-monitor",
        description="Detect emerging words in a time-sliced corpus and evaluate by controlled injection.",
    )
    parser.add_argument("--config-dir", default=DEFAULT_CONFIG_DIR,
                        help="Directory of named configurations")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="Generate a synthetic labeled corpus (JSONL)")
    synth.add_argument("--config", help="Configuration whose corpus.synth spec is used (defaults otherwise)")
    synth.add_argument("--out", required=True, help="Output JSONL path")
    synth.add_argument("--seed", type=int, help="Override the generator seed")

    gold = sub.add_parser("gold", help="Build the Naive Bayes gold standard")
    gold.add_argument("--config", required=True, help="Configuration name or JSON path")
    gold.add_argument("--output-dir", help="Where to write gold_standard.json")

    run = sub.add_parser("run", help="Run injection experiments")
    run.add_argument("--config", required=True, help="Configuration name or JSON path")
    run.add_argument("--rates", type=_csv_list(float), help="Comma-separated logistic rates, e.g. 0.3,0.5,1.0")
    run.add_argument("--mode", choices=["logistic", "control"], help="Injection mode")
    run.add_argument("--seeds", type=_csv_list(int), help="Comma-separated seeds")
    run.add_argument("--category", type=_csv_list(str), help="Comma-separated categories to inject")
    run.add_argument("--model", choices=["svd", "sgns"], help="Embedding model")
    run.add_argument("--window", type=_csv_list(int), help="Window size(s), comma-separated")
    run.add_argument("--output-dir", help="Run output directory")
    run.add_argument("--workers", type=int, help="Parallel simulations")

    plot = sub.add_parser("plotdata", help="Emit plot-ready CSV from a completed run")
    plot.add_argument("run_dir", help="Completed run directory")
    plot.add_argument("--words", type=_csv_list(str), default=[], help="Comma-separated words to dump")
    plot.add_argument("--out", help="Output directory (default: <run_dir>/plotdata)")
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def cmd_synth(args: argparse.Namespace) -> Dict[str, Any]:
    spec = SynthSpec()
    if args.config:
        config = ConfigLoader(args.config_dir).load(args.config)
        synth = config.get("corpus", {}).get("synth")
        if synth is None:
            raise ValueError(f"Configuration '{args.config}' has no corpus.synth section")
        spec = SynthSpec.from_dict(synth)
    if args.seed is not None:
        spec = SynthSpec.from_dict({**spec.to_dict(), "seed": args.seed})

    docs, fields = generate(spec)
    write_documents(docs, args.out)
    fields_path = os.path.splitext(args.out)[0] + ".fields.json"
    with open(fields_path, "w", encoding="utf-8") as f:
        json.dump({"spec": spec.to_dict(), "lexical_fields": fields}, f, indent=2, sort_keys=True)
        f.write("\n")
    return {"corpus": args.out, "lexical_fields": fields_path, "documents": len(docs)}


def cmd_gold(args: argparse.Namespace) -> Dict[str, Any]:
    service = ExperimentService(args.config, config_dir=args.config_dir)
    return service.write_gold(args.output_dir)


def cmd_run(args: argparse.Namespace) -> Dict[str, Any]:
    overrides = {
        "rates": args.rates,
        "mode": args.mode,
        "seeds": args.seeds,
        "category": args.category,
        "model": args.model,
        "window": args.window,
        "output_dir": args.output_dir,
        "workers": args.workers,
    }
    service = ExperimentService(args.config, config_dir=args.config_dir, overrides=overrides)
    result = service.run()
    return {
        "output_dir": result["output_dir"],
        "manifest": result["manifest"],
        "summary": [
            {
                "method": report["method"],
                "category": report["config"]["category"],
                "rate": report["config"]["rate"],
                "window": report["config"]["window"],
                "f_measure": report["f_measure"],
                "auc": report["auc"],
            }
            for report in result["reports"] + result["combined"]
        ],
    }


def cmd_plotdata(args: argparse.Namespace) -> Dict[str, Any]:
    return plot_data(args.run_dir, args.words, args.out)


COMMANDS = {
    "synth": cmd_synth,
    "gold": cmd_gold,
    "run": cmd_run,
    "plotdata": cmd_plotdata,
}


def _fail(exc: BaseException, code: int) -> int:
    error = {
        "error": str(exc),
        "type": exc.__class__.__name__,
        "context": getattr(exc, "context", {}),
    }
    sys.stderr.write(json.dumps(error, sort_keys=True, default=str) + "\n")
    return code


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliArgumentError as exc:
        return _fail(exc, 2)

    _configure_logging(args)
    try:
        result = COMMANDS[args.command](args)
    except Exception as exc:
        logger.debug("Command failed", exc_info=True)
        return _fail(exc, 1)

    sys.stdout.write(json.dumps(result, indent=2, sort_keys=True, default=str) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

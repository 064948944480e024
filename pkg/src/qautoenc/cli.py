"""Command-line entry point: ``qautoenc <verb> --config run.toml``.

Exit codes: 0 success, 2 configuration error, 3 missing data,
4 numerical failure (diagnostics are written before exiting).
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import experiment
from .errors import ConfigError, MissingData, NumericalFailure

EXIT_OK, EXIT_CONFIG, EXIT_MISSING, EXIT_NUMERICAL = 0, 2, 3, 4

log = logging.getLogger("qautoenc")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qautoenc", description="Quantum autoencoder experiments")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, type=Path, help="experiment TOML file")
        p.add_argument("--seed", type=int, help="override the experiment seed")
        p.add_argument("--restarts", type=int, help="override the number of training restarts")
        p.add_argument("--out", type=Path, help="override the output directory")
        return p

    verb("gen-data", "generate training/testing ground-state ensembles")
    p = verb("train", "train the encoder circuit")
    p.add_argument("--ensemble", type=Path, help="training ensemble (default <out>/train.json)")
    p = verb("evaluate", "round-trip fidelity and energy report")
    p.add_argument("--model", type=Path)
    p.add_argument("--train-data", type=Path)
    p.add_argument("--test-data", type=Path)
    p = verb("export-latent", "input and latent density matrices")
    p.add_argument("--model", type=Path)
    p.add_argument("--ensemble", type=Path)
    p.add_argument("--split", default="test", choices=("train", "test"))
    p.add_argument("--states", default="all", help="'all' or indices such as 0,3,5-7")
    p = verb("swap-demo", "shot-noise study of the SWAP-test fidelity estimate")
    p.add_argument("--model", type=Path)
    p.add_argument("--ensemble", type=Path)
    p.add_argument("--split", default="train", choices=("train", "test"))
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--exact", action="store_true", help="use exact probabilities instead of sampling")
    return parser


def run(args: argparse.Namespace) -> None:
    cfg = experiment.load_config(args.config).with_overrides(args.seed, args.restarts, args.out)
    if args.verb == "gen-data":
        experiment.gen_data(cfg)
    elif args.verb == "train":
        experiment.cmd_train(cfg, args.ensemble)
    elif args.verb == "evaluate":
        experiment.cmd_evaluate(cfg, args.model, args.train_data, args.test_data)
    elif args.verb == "export-latent":
        experiment.cmd_export_latent(cfg, args.split, args.states, args.model, args.ensemble)
    elif args.verb == "swap-demo":
        shots = None if args.exact else args.shots
        experiment.cmd_swap_demo(cfg, shots, args.split, args.model, args.ensemble)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run(args)
    except MissingData as exc:
        log.error("%s", exc)
        return EXIT_MISSING
    except NumericalFailure as exc:
        log.error("%s", exc)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: train on a CSV, write artifacts."""
from __future__ import annotations

import argparse
import sys

from .errors import FinetuneError
from .train import FinetuneConfig, run_finetune


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darkscan-finetune",
        description="Train a transformer text classifier and export "
                    "portable model artifacts")
    parser.add_argument("dataset", help="labeled CSV with text,label columns")
    parser.add_argument("--out", required=True, help="artifact directory")
    parser.add_argument("--epochs", type=int, default=5)
    parser.add_argument("--learning-rate", type=float, default=5e-4)
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-seq-len", type=int, default=64)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = FinetuneConfig(
        epochs=args.epochs, learning_rate=args.learning_rate,
        batch_size=args.batch_size, seed=args.seed,
        max_seq_len=args.max_seq_len)
    try:
        result = run_finetune(args.dataset, args.out, config, progress=print)
    except FinetuneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"artifacts written to {result.out_dir}")
    return 0


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()

"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 runtime error. Human-readable
output goes to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .backends import BACKEND_NAMES, DEFAULT_ENDPOINT, build_backend
from .corpusgen import build_corpus, build_dataset
from .detection import (AggregationMode, ThresholdConfig, compare_sites,
                        flag, load_thresholds, predict_category,
                        save_thresholds)
from .errors import DarkScanError
from .evaluation import (LRBackend, LRHyperparams, Objective, compute_metrics,
                         load_dataset, save_dataset, save_lr_model, split,
                         train_lr_baseline, tune_thresholds)
from .report import (load_report, render_comparison, render_report,
                     render_report_array)
from .scan import scan_corpus, scan_file, scan_url
from .taxonomy import canonical_order


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); we want exit 1
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _add_backend_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--backend", choices=BACKEND_NAMES, default="lexical")
    sub.add_argument("--model", default=None,
                     help="model file (lr) or artifacts directory "
                          "(transformer); defaults to $DARKSCAN_MODEL_DIR")
    sub.add_argument("--endpoint", default=DEFAULT_ENDPOINT,
                     help="service URL for the remote backend")


def build_parser() -> _Parser:
    parser = _Parser(prog="darkscan",
                     description="Audit web pages for dark-pattern text.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("scan", parents=[], help="scan a page or corpus",
                        description="Scan a URL, an HTML file, or a corpus "
                                    "directory and emit a site report.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--url")
    src.add_argument("--file")
    src.add_argument("--corpus")
    _add_backend_flags(p)
    p.add_argument("--thresholds", default=None, help="thresholds JSON file")
    p.add_argument("--mode", choices=[m.value for m in AggregationMode],
                   default=AggregationMode.ARGMAX_FRACTION.value)
    p.add_argument("--out", default=None, help="write the report here")
    p.add_argument("--format", choices=("json", "md"), default="json")
    p.add_argument("--jobs", type=int, default=None,
                   help="concurrent pages for --corpus (default: CPUs)")
    p.set_defaults(func=_cmd_scan)

    p = subs.add_parser("classify", help="classify a single text")
    p.add_argument("--text", required=True)
    _add_backend_flags(p)
    p.set_defaults(func=_cmd_classify)

    p = subs.add_parser("evaluate",
                        help="score a backend on a labeled dataset")
    p.add_argument("--dataset", required=True)
    _add_backend_flags(p)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=_cmd_evaluate)

    p = subs.add_parser("train-baseline",
                        help="train the logistic-regression baseline")
    p.add_argument("--dataset", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--out", default="model-lr.json")
    p.set_defaults(func=_cmd_train_baseline)

    p = subs.add_parser("tune-thresholds",
                        help="pick per-category flag thresholds")
    p.add_argument("--dataset", required=True)
    _add_backend_flags(p)
    p.add_argument("--objective", default="f1",
                   help="f1 or fbeta:<beta>")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="thresholds.json")
    p.set_defaults(func=_cmd_tune)

    p = subs.add_parser("compare", help="rank site reports")
    p.add_argument("reports", nargs="+", metavar="report.json")
    p.add_argument("--format", choices=("json", "md"), default="md")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_compare)

    p = subs.add_parser("serve", help="run the local HTTP service")
    p.add_argument("--bind", default="127.0.0.1:8787")
    _add_backend_flags(p)
    p.add_argument("--thresholds", default=None)
    p.add_argument("--mode", choices=[m.value for m in AggregationMode],
                   default=AggregationMode.ARGMAX_FRACTION.value)
    p.add_argument("--cors-origin", action="append", default=None,
                   help="allowed CORS origin (repeatable); default: "
                        "browser-extension origins only")
    p.set_defaults(func=_cmd_serve)

    p = subs.add_parser("make-fixtures",
                        help="generate the synthetic corpus and dataset")
    p.add_argument("--corpus-dir", default=None)
    p.add_argument("--dataset-out", default=None)
    p.add_argument("--pages", type=int, default=30)
    p.add_argument("--per-class", type=int, default=300)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=_cmd_make_fixtures)

    return parser


def _emit_output(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        print(f"wrote {out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _load_thresholds_arg(path: str | None) -> ThresholdConfig:
    return load_thresholds(path) if path else ThresholdConfig.uniform()


def _cmd_scan(args) -> int:
    backend = build_backend(args.backend, args.model, args.endpoint)
    thresholds = _load_thresholds_arg(args.thresholds)
    mode = AggregationMode(args.mode)
    if args.corpus:
        reports = scan_corpus(args.corpus, backend, thresholds, mode,
                              jobs=args.jobs)
        if len(reports) == 1:
            text = render_report(reports[0], args.format)
        elif args.format == "json":
            text = render_report_array(reports)
        else:
            text = "\n---\n\n".join(render_report(r, "md") for r in reports)
    elif args.url:
        text = render_report(
            scan_url(args.url, backend, thresholds, mode), args.format)
    else:
        text = render_report(
            scan_file(args.file, backend, thresholds, mode), args.format)
    _emit_output(text, args.out)
    return 0


def _cmd_classify(args) -> int:
    backend = build_backend(args.backend, args.model, args.endpoint)
    dist = backend.classify_batch([args.text])[0]
    for cat in canonical_order():
        print(f"{cat.display_name:<16} {dist[cat]:.6f}")
    print(f"predicted: {predict_category(dist).display_name}")
    flagged = flag(dist, ThresholdConfig.uniform())
    names = ", ".join(c.display_name for c in canonical_order()
                      if c in flagged)
    print(f"flagged: {names or '(none)'}")
    return 0


def _split_dataset(path: str, seed: int):
    examples, rejects = load_dataset(path)
    if rejects:
        print(f"skipped {len(rejects)} unparseable rows", file=sys.stderr)
    return split(examples, seed=seed)


def _cmd_evaluate(args) -> int:
    train, val, test = _split_dataset(args.dataset, args.seed)
    if args.backend == "lr" and not args.model:
        # no trained model given: train on the train split, score the test
        # split, mirroring the usual train/test protocol
        model = train_lr_baseline(train, val,
                                  LRHyperparams(seed=args.seed))
        backend = LRBackend(model)
    else:
        backend = build_backend(args.backend, args.model, args.endpoint)
    texts = [ex.text for ex in test]
    gold = [ex.label for ex in test]
    predicted = [predict_category(d) for d in backend.classify_batch(texts)]
    metrics = compute_metrics(predicted, gold)
    print(json.dumps(metrics.to_json_dict(), indent=2))
    return 0


def _cmd_train_baseline(args) -> int:
    train, val, test = _split_dataset(args.dataset, args.seed)
    hyper = LRHyperparams(learning_rate=args.lr, epochs=args.epochs,
                          seed=args.seed)
    model = train_lr_baseline(train, val, hyper)
    save_lr_model(model, args.out)
    predicted = [predict_category(d)
                 for d in LRBackend(model).classify_batch(
                     [ex.text for ex in test])]
    test_acc = compute_metrics(predicted, [ex.label for ex in test]).accuracy
    print(f"trained on {len(train)} examples, "
          f"val accuracy {model.val_accuracy:.4f}, "
          f"test accuracy {test_acc:.4f}")
    print(f"model written to {args.out}")
    return 0


def _cmd_tune(args) -> int:
    train, val, test = _split_dataset(args.dataset, args.seed)
    if args.backend == "lr" and not args.model:
        model = train_lr_baseline(train, val, LRHyperparams(seed=args.seed))
        backend = LRBackend(model)
    else:
        backend = build_backend(args.backend, args.model, args.endpoint)
    objective = Objective.parse(args.objective)
    dists = backend.classify_batch([ex.text for ex in val])
    config = tune_thresholds(
        list(zip(dists, (ex.label for ex in val))), objective)
    save_thresholds(config, args.out)
    for cat in canonical_order():
        if cat in config.notes:
            print(f"note: {cat.display_name}: {config.notes[cat]}",
                  file=sys.stderr)
    print(f"thresholds written to {args.out}")
    return 0


def _cmd_compare(args) -> int:
    if len(args.reports) < 2:
        raise _UsageError("compare needs at least two report files")
    reports = [load_report(p) for p in args.reports]
    text = render_comparison(compare_sites(reports), args.format)
    _emit_output(text, args.out)
    return 0


def _cmd_serve(args) -> int:
    from .service import serve
    backend = build_backend(args.backend, args.model, args.endpoint)
    thresholds = _load_thresholds_arg(args.thresholds)
    serve(args.bind, backend, thresholds, AggregationMode(args.mode),
          cors_origins=args.cors_origin)
    return 0


def _cmd_make_fixtures(args) -> int:
    did_something = False
    if args.corpus_dir:
        manifest = build_corpus(args.corpus_dir, n_pages=args.pages,
                                seed=args.seed)
        print(f"corpus: {len(manifest.pages)} pages, "
              f"{len(manifest.planted)} planted strings "
              f"-> {args.corpus_dir}")
        did_something = True
    if args.dataset_out:
        examples = build_dataset(n_per_class=args.per_class, seed=args.seed)
        save_dataset(examples, args.dataset_out)
        print(f"dataset: {len(examples)} rows -> {args.dataset_out}")
        did_something = True
    if not did_something:
        raise _UsageError("pass --corpus-dir and/or --dataset-out")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DarkScanError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())

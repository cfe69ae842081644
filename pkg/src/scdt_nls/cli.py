"""Command-line entry point wiring the library into reproducible workflows.

Logs go to stderr; data goes to stdout or to files named by flags.  Exit
codes: 0 success, 1 runtime error, 2 usage error.  All randomness flows from
``--seed``.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import bench, classifier
from .errors import ScdtNlsError
from .signals import read_ucr_tsv, write_ucr_tsv
from .subspace import EnrichmentConfig
from .synth import (
    SynthConfig,
    generate,
    proof_of_concept_templates,
    prototype_templates,
)
from .transform import TransformConfig, scdt

_THREAD_ENV_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _log(message):
    print(message, file=sys.stderr)


def _apply_thread_cap(args):
    threads = getattr(args, "threads", None)
    if threads is None:
        value = os.environ.get("SCDT_NLS_THREADS")
        threads = int(value) if value else None
    if threads is not None:
        # best effort: caps BLAS pools created after this point
        for var in _THREAD_ENV_VARS:
            os.environ[var] = str(threads)


def _transform_config(args):
    return TransformConfig(quantile_count=getattr(args, "quantiles", None))


def _parse_sizes(text):
    try:
        sizes = [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list: {text!r}")
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError(f"bad size list: {text!r}")
    return sizes


def _parse_methods(text):
    methods = [m for m in text.split(",") if m]
    for m in methods:
        if m not in bench.KNOWN_METHODS:
            raise argparse.ArgumentTypeError(f"unknown method: {m!r}")
    return methods


def _cmd_synth(args):
    if args.templates == "fig5":
        templates = proof_of_concept_templates(args.length)
    else:
        templates = prototype_templates(args.length)
    regime = "out_distribution" if args.regime == "out" else "in_distribution"
    config = SynthConfig(
        regime=regime,
        samples_per_template=args.samples_per_template,
        seed=args.seed,
    )
    ds = generate(templates, config)
    write_ucr_tsv(ds, args.out)
    _log(f"wrote {len(ds)} samples ({ds.class_count} classes) to {args.out}")
    return 0


def _cmd_transform(args):
    ds = read_ucr_tsv(args.data)
    config = _transform_config(args)
    features = [scdt(s, config).flatten() for s in ds.signals]
    rows = [
        [ds.original_labels[label]] + [float(v) for v in feat]
        for label, feat in zip(ds.labels, features)
    ]
    if args.format == "json":
        payload = json.dumps(
            {"quantile_count": features[0].size // 2 - 1, "rows": rows}
        )
        _write_text(args.out, payload + "\n")
    else:
        lines = ["\t".join(repr(v) for v in row) for row in rows]
        _write_text(args.out, "\n".join(lines) + "\n")
    _log(f"transformed {len(rows)} signals")
    return 0


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_train(args):
    ds = read_ucr_tsv(args.data)
    config = _transform_config(args)
    if args.tune:
        k, n, accuracy = classifier.tune(
            ds,
            transform_config=config,
            k_grid=range(1, args.k_max + 1) if args.k_max else None,
            n_grid=range(0, args.n_max + 1) if args.n_max is not None else None,
            val_fraction=args.val_fraction,
            seed=args.seed,
            use_translation=not args.no_translation,
            variance_cutoff=args.variance,
        )
        _log(f"tuned k={k} N={n} (validation accuracy {accuracy:.4f})")
    else:
        k, n = args.k, args.enrich_n
    model = classifier.train(
        ds,
        transform_config=config,
        enrichment=EnrichmentConfig(
            use_translation=not args.no_translation, harmonic_order=n
        ),
        k=k,
        variance_cutoff=args.variance,
    )
    classifier.save_model(model, args.model)
    _log(f"saved model with k={k} N={n} to {args.model}")
    return 0


def _cmd_predict(args):
    model = classifier.load_model(args.model)
    ds = read_ucr_tsv(args.data)
    predicted = classifier.predict_dataset(model, ds)
    labels = [model.class_labels[p] for p in predicted]
    if args.out:
        lines = [
            "\t".join(str(v) for v in pair)
            for pair in zip(range(len(labels)), labels)
        ]
        _write_text(args.out, "\n".join(lines) + "\n")
    accuracy = float(
        np.mean([ds.original_labels[t] == p for t, p in zip(ds.labels, labels)])
    )
    print(json.dumps({"samples": len(labels), "accuracy": accuracy}))
    return 0


def _cmd_tune(args):
    ds = read_ucr_tsv(args.data)
    k, n, accuracy = classifier.tune(
        ds,
        transform_config=_transform_config(args),
        k_grid=range(1, args.k_max + 1) if args.k_max else None,
        n_grid=range(0, args.n_max + 1) if args.n_max is not None else None,
        val_fraction=args.val_fraction,
        seed=args.seed,
        use_translation=not args.no_translation,
        variance_cutoff=args.variance,
    )
    print(json.dumps({"k": k, "N": n, "validation_accuracy": accuracy}))
    return 0


def _emit_report(report, args):
    if args.out:
        bench.write_cells_csv(report.cells, args.out)
        _log(f"wrote {len(report.cells)} result rows to {args.out}")
    summary = json.dumps(report.to_dict(), indent=2)
    if args.summary:
        _write_text(args.summary, summary + "\n")
    else:
        print(summary)


def _cmd_benchmark(args):
    methods = args.methods
    if args.synthetic:
        templates = proof_of_concept_templates(args.length)
        per_template = max(1, math.ceil(max(args.sizes) / 2))
        pool = generate(
            templates,
            SynthConfig(samples_per_template=per_template, seed=args.seed),
        )
        test_ds = generate(
            templates,
            SynthConfig(
                samples_per_template=args.test_per_template, seed=args.seed + 1
            ),
        )
        cells = []
        for method in methods:
            report, curve = bench.run_data_efficiency(
                method,
                pool,
                test_ds,
                sizes=args.sizes,
                repeats=args.repeats,
                seed=args.seed,
                dataset_name="fig5-synthetic",
                # synthetic features cluster near one ray; keep full bases
                options={"variance_cutoff": 1.0},
            )
            cells.extend(report.cells)
            for size, mean, std in curve:
                _log(f"{method} size={size}: accuracy {mean:.4f} +- {std:.4f}")
        report = bench.MetricsReport(cells=tuple(cells))
    else:
        train_ds = read_ucr_tsv(args.train)
        test_ds = read_ucr_tsv(args.test)
        name = os.path.basename(args.train)
        report = bench.run_accuracy(
            methods, train_ds, test_ds, seed=args.seed, dataset_name=name
        )
        for cell in report.cells:
            _log(f"{cell.method}: accuracy {cell.accuracy:.4f}")
    _emit_report(report, args)
    return 0


def _cmd_outdist(args):
    report = bench.run_out_distribution(
        seed=args.seed,
        sizes=args.sizes,
        test_per_class=args.test_per_class,
        n=args.length,
        methods=args.methods,
    )
    for cell in report.cells:
        _log(f"{cell.method} size={cell.size}: accuracy {cell.accuracy:.4f}")
    _emit_report(report, args)
    return 0


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=None)


def _add_model_flags(parser):
    parser.add_argument("--quantiles", type=int, default=None)
    parser.add_argument("--variance", type=float, default=0.99)
    parser.add_argument("--no-translation", action="store_true")
    parser.add_argument("--k-max", type=int, default=None)
    parser.add_argument("--n-max", type=int, default=None)
    parser.add_argument("--val-fraction", type=float, default=0.1)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="scdt-nls",
        description="Transport-transform nearest-local-subspace classification",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("synth", help="generate a synthetic warped dataset")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--templates", choices=["fig5", "prototypes"], default="fig5")
    p.add_argument("--samples-per-template", type=int, default=8)
    p.add_argument("--regime", choices=["in", "out"], default="in")
    p.add_argument("--length", type=int, default=256)
    p.set_defaults(handler=_cmd_synth)

    p = sub.add_parser("transform", help="write transform features for a dataset")
    _add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--quantiles", type=int, default=None)
    p.set_defaults(handler=_cmd_transform)

    p = sub.add_parser("train", help="fit a model and save it as JSON")
    _add_common(p)
    _add_model_flags(p)
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--enrich-n", type=int, default=0)
    p.add_argument("--tune", action="store_true")
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser("predict", help="classify a dataset with a saved model")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_predict)

    p = sub.add_parser("tune", help="pick (k, N) on a validation split")
    _add_common(p)
    _add_model_flags(p)
    p.add_argument("--data", required=True)
    p.set_defaults(handler=_cmd_tune)

    p = sub.add_parser("benchmark", help="accuracy tables and size sweeps")
    _add_common(p)
    p.add_argument("--synthetic", choices=["fig5"], default=None)
    p.add_argument("--train", default=None)
    p.add_argument("--test", default=None)
    p.add_argument("--methods", type=_parse_methods, default=["nls", "dtw"])
    p.add_argument("--sizes", type=_parse_sizes, default=[2, 4, 8, 16])
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--test-per-template", type=int, default=50)
    p.add_argument("--length", type=int, default=256)
    p.add_argument("--out", default=None)
    p.add_argument("--summary", default=None)
    p.set_defaults(handler=_cmd_benchmark)

    p = sub.add_parser("outdist", help="distribution-shift robustness run")
    _add_common(p)
    p.add_argument("--methods", type=_parse_methods, default=["nls", "dtw"])
    p.add_argument("--sizes", type=_parse_sizes, default=[2, 4, 8, 16])
    p.add_argument("--test-per-class", type=int, default=300)
    p.add_argument("--length", type=int, default=256)
    p.add_argument("--out", default=None)
    p.add_argument("--summary", default=None)
    p.set_defaults(handler=_cmd_outdist)

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if args.subcommand == "benchmark" and not args.synthetic:
        if not (args.train and args.test):
            print(
                "usage error: benchmark needs --synthetic or both --train and --test",
                file=sys.stderr,
            )
            return 2
    _apply_thread_cap(args)
    try:
        return args.handler(args) or 0
    except (ScdtNlsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

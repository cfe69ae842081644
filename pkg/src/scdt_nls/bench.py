"""Experiment harness: accuracy runs, sweeps, rank statistics, and timing.

Results are collected as flat cells (one per method, dataset, size, repeat)
and aggregated into per-method statistics: mean per-class error (the error
rate divided by the class count, averaged over result groups), arithmetic
and geometric mean ranks, and win counts.  Cells can be written as CSV and
whole reports as JSON; no plotting dependency is involved.
"""

import csv
import platform
import time
from dataclasses import dataclass, asdict

import numpy as np
from scipy.stats import rankdata

from . import classifier
from .dtw import DtwConfig, knn_dtw_classify, tune_window
from .errors import ConfigError
from .subspace import EnrichmentConfig
from .synth import SynthConfig, generate, prototype_templates

__all__ = [
    "CellResult",
    "MetricsReport",
    "run_accuracy",
    "run_data_efficiency",
    "run_out_distribution",
    "write_cells_csv",
]

KNOWN_METHODS = ("nls", "dtw")


@dataclass(frozen=True)
class CellResult:
    """One (method, dataset, size, repeat) evaluation."""

    method: str
    dataset: str
    size: int
    repeat: int
    accuracy: float
    class_count: int
    train_seconds: float
    predict_seconds: float

    @property
    def error(self):
        return 1.0 - self.accuracy

    @property
    def pce(self):
        return self.error / self.class_count


@dataclass(frozen=True)
class MetricsReport:
    """Cells plus rank-based aggregates over (dataset, size, repeat) groups."""

    cells: tuple

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))

    def methods(self):
        seen = []
        for cell in self.cells:
            if cell.method not in seen:
                seen.append(cell.method)
        return seen

    def groups(self):
        seen = []
        for cell in self.cells:
            key = (cell.dataset, cell.size, cell.repeat)
            if key not in seen:
                seen.append(key)
        return seen

    def cell(self, method, group):
        for c in self.cells:
            if c.method == method and (c.dataset, c.size, c.repeat) == group:
                return c
        raise KeyError(f"no cell for {method} on {group}")

    def accuracy(self, method, dataset):
        values = [c.accuracy for c in self.cells
                  if c.method == method and c.dataset == dataset]
        if not values:
            raise KeyError(f"no cells for {method} on {dataset}")
        return float(np.mean(values))

    def mpce(self, method):
        values = [self.cell(method, g).pce for g in self.groups()]
        return float(np.mean(values))

    def _rank_table(self):
        methods = self.methods()
        table = {}
        for group in self.groups():
            accuracies = np.array([self.cell(m, group).accuracy for m in methods])
            ranks = rankdata(-accuracies, method="average")
            table[group] = dict(zip(methods, ranks))
        return table

    def mean_rank(self, method):
        table = self._rank_table()
        return float(np.mean([table[g][method] for g in self.groups()]))

    def geometric_mean_rank(self, method):
        table = self._rank_table()
        ranks = np.array([table[g][method] for g in self.groups()])
        return float(np.exp(np.mean(np.log(ranks))))

    def wins(self, method):
        count = 0
        for group in self.groups():
            best = max(self.cell(m, group).accuracy for m in self.methods())
            if self.cell(method, group).accuracy == best:
                count += 1
        return count

    def to_dict(self):
        return {
            "environment": {
                "platform": platform.platform(),
                "python": platform.python_version(),
                "numpy": np.__version__,
            },
            "cells": [asdict(c) for c in self.cells],
            "methods": {
                m: {
                    "mpce": self.mpce(m),
                    "mean_rank": self.mean_rank(m),
                    "geometric_mean_rank": self.geometric_mean_rank(m),
                    "wins": self.wins(m),
                }
                for m in self.methods()
            },
        }


def write_cells_csv(cells, path):
    """One row per cell: method,dataset,size,repeat,accuracy,train_s,predict_s."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["method", "dataset", "size", "repeat", "accuracy", "train_s", "predict_s"]
        )
        for c in cells:
            writer.writerow(
                [c.method, c.dataset, c.size, c.repeat,
                 repr(c.accuracy), repr(c.train_seconds), repr(c.predict_seconds)]
            )


def _derive_seed(seed, size, repeat):
    return int(seed) * 1_000_003 + int(size) * 1009 + int(repeat)


def _fit_and_score_nls(train_ds, test_ds, seed, options):
    options = options or {}
    transform_config = options.get("transform_config")
    val_fraction = options.get("val_fraction", 0.1)
    variance_cutoff = options.get("variance_cutoff", 0.99)
    t0 = time.perf_counter()
    if train_ds.class_counts().min() >= 2:
        k, n, _ = classifier.tune(
            train_ds,
            transform_config=transform_config,
            k_grid=options.get("k_grid"),
            n_grid=options.get("n_grid"),
            val_fraction=val_fraction,
            seed=seed,
            variance_cutoff=variance_cutoff,
        )
    else:
        k, n = 1, 0  # too few samples to split off a validation set
    model = classifier.train(
        train_ds,
        transform_config=transform_config,
        enrichment=EnrichmentConfig(use_translation=True, harmonic_order=n),
        k=k,
        variance_cutoff=variance_cutoff,
    )
    train_seconds = time.perf_counter() - t0
    t0 = time.perf_counter()
    accuracy = classifier.score(model, test_ds)
    predict_seconds = (time.perf_counter() - t0) / len(test_ds)
    return accuracy, train_seconds, predict_seconds


def _fit_and_score_dtw(train_ds, test_ds, seed, options):
    options = options or {}
    val_fraction = options.get("val_fraction", 0.1)
    t0 = time.perf_counter()
    if train_ds.class_counts().min() >= 2:
        window, _ = tune_window(
            train_ds,
            window_grid=options.get("window_grid"),
            val_fraction=val_fraction,
            seed=seed,
        )
    else:
        window = train_ds.length - 1  # unconstrained when tuning is impossible
    config = DtwConfig(window=window)
    train_seconds = time.perf_counter() - t0
    t0 = time.perf_counter()
    hits = sum(
        knn_dtw_classify(train_ds, s, config) == int(label)
        for s, label in zip(test_ds.signals, test_ds.labels)
    )
    predict_seconds = (time.perf_counter() - t0) / len(test_ds)
    return hits / len(test_ds), train_seconds, predict_seconds


_RUNNERS = {"nls": _fit_and_score_nls, "dtw": _fit_and_score_dtw}


def _evaluate(method, train_ds, test_ds, seed, options):
    if method not in _RUNNERS:
        raise ConfigError(f"unknown method {method!r}; known: {KNOWN_METHODS}")
    return _RUNNERS[method](train_ds, test_ds, seed, options)


def _per_class_size(ds):
    return int(len(ds)) // ds.class_count


def run_accuracy(methods, train_ds, test_ds, seed=0, dataset_name="dataset",
                 options=None):
    """Train and score each method once on one train/test pair."""
    cells = []
    for method in methods:
        accuracy, train_s, predict_s = _evaluate(
            method, train_ds, test_ds, seed, options
        )
        cells.append(
            CellResult(
                method=method,
                dataset=dataset_name,
                size=_per_class_size(train_ds),
                repeat=0,
                accuracy=accuracy,
                class_count=train_ds.class_count,
                train_seconds=train_s,
                predict_seconds=predict_s,
            )
        )
    return MetricsReport(cells=tuple(cells))


def _stratified_subset(ds, per_class, rng):
    if per_class > ds.class_counts().min():
        raise ConfigError(
            f"cannot draw {per_class} samples per class from {ds.class_counts()}"
        )
    picked = []
    for c in range(ds.class_count):
        idx = ds.class_indices(c)
        chosen = rng.choice(idx.size, size=per_class, replace=False)
        picked.append(idx[np.sort(chosen)])
    return ds.subset(np.sort(np.concatenate(picked)))


def run_data_efficiency(method, train_ds, test_ds, sizes, repeats=10, seed=0,
                        dataset_name="dataset", options=None):
    """Accuracy as a function of training samples per class.

    For each size, ``repeats`` stratified subsets are drawn from the training
    set, a model is fit on each and scored on the test set.  Returns
    ``(report, curve)`` where the curve lists (size, mean accuracy, std).
    """
    cells = []
    for size in sizes:
        for repeat in range(repeats):
            rng = np.random.default_rng([seed, size, repeat])
            subset = _stratified_subset(train_ds, size, rng)
            accuracy, train_s, predict_s = _evaluate(
                method, subset, test_ds, _derive_seed(seed, size, repeat), options
            )
            cells.append(
                CellResult(
                    method=method,
                    dataset=dataset_name,
                    size=size,
                    repeat=repeat,
                    accuracy=accuracy,
                    class_count=train_ds.class_count,
                    train_seconds=train_s,
                    predict_seconds=predict_s,
                )
            )
    curve = []
    for size in sizes:
        values = np.array([c.accuracy for c in cells if c.size == size])
        curve.append((size, float(values.mean()), float(values.std())))
    return MetricsReport(cells=tuple(cells)), curve


def run_out_distribution(seed=0, sizes=(2, 4, 8, 16), test_per_class=300,
                         n=256, methods=("nls", "dtw"), options=None):
    """Distribution-shift study on the three prototype templates.

    Training corpora are drawn from the narrow parameter intervals, the test
    corpus from the wide ones, and each method is evaluated at every
    training size.  Synthetic transform features concentrate near a single
    ray, so the variance cutoff defaults to 1.0 here (no basis truncation).
    """
    options = {"variance_cutoff": 1.0, **(options or {})}
    templates = prototype_templates(n)
    test_ds = generate(
        templates,
        SynthConfig(
            regime="out_distribution",
            samples_per_template=test_per_class,
            seed=_derive_seed(seed, 0, 1),
        ),
    )
    cells = []
    for size in sizes:
        train_ds = generate(
            templates,
            SynthConfig(
                regime="in_distribution",
                samples_per_template=size,
                seed=_derive_seed(seed, size, 0),
            ),
        )
        for method in methods:
            accuracy, train_s, predict_s = _evaluate(
                method, train_ds, test_ds, _derive_seed(seed, size, 2), options
            )
            cells.append(
                CellResult(
                    method=method,
                    dataset="prototype-shift",
                    size=size,
                    repeat=0,
                    accuracy=accuracy,
                    class_count=train_ds.class_count,
                    train_seconds=train_s,
                    predict_seconds=predict_s,
                )
            )
    return MetricsReport(cells=tuple(cells))

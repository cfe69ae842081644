"""Signal and dataset containers plus UCR-style TSV ingestion.

Signals are uniformly sampled 1D series with explicit grid metadata.  All
containers are immutable after construction so they can be shared freely
across parallel workers.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyDataset, FormatError, ParseError, SplitError

__all__ = [
    "Grid",
    "Signal",
    "LabeledDataset",
    "read_ucr_tsv",
    "write_ucr_tsv",
    "stratified_split",
]


@dataclass(frozen=True)
class Grid:
    """Uniform sampling grid: ``n`` points starting at ``t0`` with step ``dt``."""

    t0: float
    dt: float
    n: int

    def __post_init__(self):
        if not (self.dt > 0):
            raise ValueError("dt must be positive")
        if self.n < 2:
            raise ValueError("grid needs at least 2 points")

    def times(self):
        return self.t0 + self.dt * np.arange(self.n)

    @property
    def end(self):
        return self.t0 + self.dt * (self.n - 1)

    def matches(self, other, rtol=1e-9):
        return (
            self.n == other.n
            and math.isclose(self.t0, other.t0, rel_tol=rtol, abs_tol=1e-12)
            and math.isclose(self.dt, other.dt, rel_tol=rtol)
        )


@dataclass(frozen=True, eq=False)
class Signal:
    """A real-valued series on a uniform grid.

    Invariants: all samples finite, ``dt > 0`` and at least 2 samples.
    The sample array is made read-only.
    """

    samples: np.ndarray
    t0: float = 0.0
    dt: float = 1.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if samples.size < 2:
            raise ValueError("a signal needs at least 2 samples")
        if not np.isfinite(samples).all():
            raise ValueError("samples must be finite")
        if not (self.dt > 0):
            raise ValueError("dt must be positive")
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @classmethod
    def on_unit_interval(cls, samples):
        """Build a signal whose grid spans [0, 1]."""
        samples = np.asarray(samples, dtype=np.float64)
        return cls(samples, t0=0.0, dt=1.0 / (samples.size - 1))

    @property
    def n(self):
        return self.samples.size

    @property
    def grid(self):
        return Grid(self.t0, self.dt, self.n)

    def times(self):
        return self.grid.times()

    @property
    def domain(self):
        return (self.t0, self.grid.end)


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Equal-grid signals with contiguous 0-based class labels.

    ``original_labels[c]`` records the label value class ``c`` carried in its
    source file; synthetic datasets default to the identity mapping.
    """

    signals: tuple
    labels: np.ndarray
    class_count: int
    original_labels: tuple = field(default=None)

    def __post_init__(self):
        signals = tuple(self.signals)
        labels = np.asarray(self.labels, dtype=np.int64)
        labels = labels.copy()
        labels.flags.writeable = False
        if len(signals) != labels.size:
            raise ValueError("labels and signals must have the same length")
        if len(signals) == 0:
            raise EmptyDataset("dataset has no samples")
        grid = signals[0].grid
        for s in signals[1:]:
            if not grid.matches(s.grid):
                raise ValueError("all signals must share one grid")
        if self.class_count < 1:
            raise ValueError("class_count must be at least 1")
        if labels.min() < 0 or labels.max() >= self.class_count:
            raise ValueError("labels must lie in [0, class_count)")
        counts = np.bincount(labels, minlength=self.class_count)
        if (counts == 0).any():
            missing = int(np.flatnonzero(counts == 0)[0])
            raise ValueError(f"class {missing} has no samples")
        original = self.original_labels
        if original is None:
            original = tuple(range(self.class_count))
        else:
            original = tuple(original)
            if len(original) != self.class_count:
                raise ValueError("original_labels must have class_count entries")
        object.__setattr__(self, "signals", signals)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "original_labels", original)

    def __len__(self):
        return len(self.signals)

    @property
    def grid(self):
        return self.signals[0].grid

    @property
    def length(self):
        return self.signals[0].n

    def matrix(self):
        """Stack all samples into an (L, n) array."""
        return np.stack([s.samples for s in self.signals])

    def class_counts(self):
        return np.bincount(self.labels, minlength=self.class_count)

    def class_indices(self, c):
        return np.flatnonzero(self.labels == c)

    def subset(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(
            signals=tuple(self.signals[i] for i in indices),
            labels=self.labels[indices],
            class_count=self.class_count,
            original_labels=self.original_labels,
        )


def _format_label(value):
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def read_ucr_tsv(path):
    """Read a UCR-style TSV file into a :class:`LabeledDataset`.

    One record per line: the class label followed by the series values,
    separated by tabs or whitespace.  Lines starting with ``#`` and blank
    lines are skipped.  Labels are remapped to contiguous 0-based indices in
    sorted order of their original values; the grid is normalized to [0, 1].
    """
    raw_labels = []
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tokens = stripped.split()
            if width is None:
                width = len(tokens)
                if width < 3:
                    raise FormatError(
                        f"row {lineno}: need a label and at least 2 values",
                        row=lineno,
                    )
            elif len(tokens) != width:
                raise FormatError(
                    f"row {lineno}: expected {width} fields, got {len(tokens)}",
                    row=lineno,
                )
            values = np.empty(width - 1)
            for col, token in enumerate(tokens):
                try:
                    value = float(token)
                except ValueError:
                    raise ParseError(
                        f"row {lineno}, column {col + 1}: not a number: {token!r}",
                        row=lineno,
                        col=col + 1,
                    ) from None
                if col == 0:
                    raw_labels.append(value)
                else:
                    values[col - 1] = value
            rows.append(values)
    if not rows:
        raise EmptyDataset(f"no records in {path}")
    originals = sorted(set(raw_labels))
    remap = {v: i for i, v in enumerate(originals)}
    n = width - 1
    dt = 1.0 / (n - 1)
    signals = tuple(Signal(r, t0=0.0, dt=dt) for r in rows)
    labels = np.array([remap[v] for v in raw_labels], dtype=np.int64)
    return LabeledDataset(
        signals=signals,
        labels=labels,
        class_count=len(originals),
        original_labels=tuple(originals),
    )


def write_ucr_tsv(ds, path):
    """Write a dataset in the UCR TSV layout (label first, then values).

    Values are written with full round-trip precision; the sampling grid is
    not stored by the format, so readers recover the normalized [0, 1] grid.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for signal, label in zip(ds.signals, ds.labels):
            original = ds.original_labels[label]
            fields = [_format_label(original)]
            fields.extend(repr(float(v)) for v in signal.samples)
            fh.write("\t".join(fields) + "\n")


def stratified_split(ds, fraction, seed):
    """Split off ``ceil(fraction * L_c)`` samples per class.

    Returns ``(remainder, held_out)``.  The union of the two parts is a
    permutation of the input and the draw is deterministic for a fixed seed.
    """
    if not (0.0 < fraction < 1.0):
        raise SplitError("fraction must lie in (0, 1)")
    counts = ds.class_counts()
    if counts.min() < 2:
        c = int(np.argmin(counts))
        raise SplitError(f"class {c} has fewer than 2 samples")
    rng = np.random.default_rng(seed)
    held, kept = [], []
    for c in range(ds.class_count):
        idx = ds.class_indices(c)
        take = math.ceil(fraction * idx.size)
        if take >= idx.size:
            raise SplitError(
                f"class {c}: fraction {fraction} leaves no remainder samples"
            )
        chosen = rng.choice(idx.size, size=take, replace=False)
        mask = np.zeros(idx.size, dtype=bool)
        mask[chosen] = True
        held.append(idx[mask])
        kept.append(idx[~mask])
    kept = np.sort(np.concatenate(kept))
    held = np.sort(np.concatenate(held))
    return ds.subset(kept), ds.subset(held)

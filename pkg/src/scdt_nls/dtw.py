"""Band-constrained dynamic time warping and its 1-nearest-neighbor classifier.

The distance is the square root of the minimal sum of squared pointwise
differences over monotone alignment paths whose index offset never exceeds
the window half-width (a Sakoe-Chiba band).  A window of 0 degenerates to
the Euclidean distance.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConfigError, DimensionError
from .signals import stratified_split

__all__ = ["DtwConfig", "dtw_distance", "knn_dtw_classify", "tune_window"]


@dataclass(frozen=True)
class DtwConfig:
    """Sakoe-Chiba band half-width; must stay below the series length."""

    window: int = 0

    def __post_init__(self):
        if self.window < 0:
            raise ValueError("window must be nonnegative")


@njit(cache=True)
def _dtw_squared(a, b, window):
    # cells outside the band stay at inf, which excludes their transitions
    n = a.shape[0]
    prev = np.full(n, np.inf)
    for i in range(n):
        cur = np.full(n, np.inf)
        lo = i - window if i - window > 0 else 0
        hi = i + window if i + window < n - 1 else n - 1
        for j in range(lo, hi + 1):
            d = a[i] - b[j]
            cost = d * d
            if i == 0 and j == 0:
                cur[j] = cost
                continue
            best = np.inf
            if j > 0 and cur[j - 1] < best:
                best = cur[j - 1]
            if i > 0 and prev[j] < best:
                best = prev[j]
            if i > 0 and j > 0 and prev[j - 1] < best:
                best = prev[j - 1]
            cur[j] = cost + best
        prev = cur
    return prev[n - 1]


def dtw_distance(a, b, config=None):
    """Band-constrained DTW distance between two equal-length signals."""
    config = config or DtwConfig()
    x = a.samples
    y = b.samples
    if x.size != y.size:
        raise DimensionError("dtw requires equal-length signals")
    if config.window >= x.size:
        raise ConfigError(f"window {config.window} must be below length {x.size}")
    return float(np.sqrt(_dtw_squared(x, y, config.window)))


def knn_dtw_classify(train_ds, signal, config=None):
    """Class of the training sample nearest in DTW distance (ties: lowest index)."""
    distances = np.array(
        [dtw_distance(s, signal, config) for s in train_ds.signals]
    )
    return int(train_ds.labels[int(np.argmin(distances))])


def tune_window(ds, window_grid=None, val_fraction=0.1, seed=0):
    """Pick the band half-width by accuracy on a stratified validation split.

    Ties are broken toward the smaller window.  Returns
    ``(window, validation_accuracy)``.
    """
    n = ds.length
    if window_grid is None:
        window_grid = [0, 1, 2, 4, 8, 16, 32, 64, 128]
    window_grid = sorted({int(w) for w in window_grid if 0 <= int(w) < n})
    if not window_grid:
        raise ConfigError("window_grid has no usable entries")
    remainder, validation = stratified_split(ds, val_fraction, seed)
    best = None
    for window in window_grid:
        config = DtwConfig(window=window)
        hits = sum(
            knn_dtw_classify(remainder, s, config) == int(label)
            for s, label in zip(validation.signals, validation.labels)
        )
        accuracy = hits / len(validation)
        if best is None or accuracy > best[0]:
            best = (accuracy, window)
    accuracy, window = best
    return window, accuracy

"""Shared test fixtures: signal builders and independent oracles.

The oracles here deliberately avoid the library's own code paths: residuals
come from least-squares normal equations, DTW from exhaustive alignment
enumeration, and analytic results from closed-form calculus.
"""

import numpy as np

from scdt_nls import Signal


def trapz(values, dx):
    return dx * (values.sum() - 0.5 * (values[0] + values[-1]))


def hann_bump(t, center, width):
    """Smooth nonnegative bump with exact compact support [c - w/2, c + w/2]."""
    x = (t - center) / width
    return np.where(np.abs(x) < 0.5, 0.5 * (1.0 + np.cos(2.0 * np.pi * x)), 0.0)


def bump_signal(n=512, center=0.5, width=0.3, amplitude=1.0):
    t = np.linspace(0.0, 1.0, n)
    return Signal.on_unit_interval(amplitude * hann_bump(t, center, width))


def signed_wave(n=512, center=0.5, width=0.4, freq=4.0):
    """Oscillating compact signal whose positive and negative parts are both
    nonzero."""
    t = np.linspace(0.0, 1.0, n)
    return Signal.on_unit_interval(
        hann_bump(t, center, width) * np.sin(2.0 * np.pi * freq * (t - center))
    )


def trig_signal(n, max_freq, rng, dc=0.0):
    """Random bandlimited signal: trig polynomial up to ``max_freq`` cycles."""
    t = np.linspace(0.0, 1.0, n)
    coef = rng.normal(size=(2, max_freq))
    y = sum(
        coef[0, k] * np.cos(2.0 * np.pi * (k + 1) * t)
        + coef[1, k] * np.sin(2.0 * np.pi * (k + 1) * t)
        for k in range(max_freq)
    )
    return Signal.on_unit_interval(y + dc)


def affine_warp(omega, tau):
    """g(t) = omega * t - tau with its exact derivative."""
    return (
        lambda t: omega * t - tau,
        lambda t: omega * np.ones_like(t),
    )


def lstsq_residual(x, vectors):
    """Squared distance from x to span(vectors) via least squares."""
    matrix = np.column_stack(vectors)
    coef, *_ = np.linalg.lstsq(matrix, x, rcond=None)
    diff = x - matrix @ coef
    return float(diff @ diff)


def dtw_brute_force(a, b):
    """Minimal summed squared cost over all monotone alignment paths."""
    n, m = len(a), len(b)
    best = [np.inf]

    def walk(i, j, cost):
        cost += (a[i] - b[j]) ** 2
        if cost >= best[0]:
            return
        if i == n - 1 and j == m - 1:
            best[0] = cost
            return
        if i + 1 < n:
            walk(i + 1, j, cost)
        if j + 1 < m:
            walk(i, j + 1, cost)
        if i + 1 < n and j + 1 < m:
            walk(i + 1, j + 1, cost)

    walk(0, 0, 0.0)
    return float(np.sqrt(best[0]))


def make_dataset(class_signals):
    """LabeledDataset from {class_index: [Signal, ...]}."""
    from scdt_nls import LabeledDataset

    signals = []
    labels = []
    for c in sorted(class_signals):
        for s in class_signals[c]:
            signals.append(s)
            labels.append(c)
    return LabeledDataset(
        signals=tuple(signals),
        labels=np.array(labels),
        class_count=len(class_signals),
    )


def random_tiny_dataset(rng, classes=3, per_class=5, n=64):
    """Smooth random signals in distinct per-class frequency bands."""
    t = np.linspace(0.0, 1.0, n)
    groups = {}
    for c in range(classes):
        sigs = []
        for _ in range(per_class):
            base = hann_bump(t, 0.5, 0.7) * np.sin(
                2.0 * np.pi * (c + 2) * (t - 0.5) + rng.normal(0, 0.3)
            )
            sigs.append(Signal.on_unit_interval(base + 0.05 * rng.normal(size=n)))
        groups[c] = sigs
    return make_dataset(groups)

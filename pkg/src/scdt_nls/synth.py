"""Synthetic warped-signal corpora: templates, warp sampling, generation.

Warps have the form ``g(t) = omega * zeta(t) + tau`` where ``zeta`` is the
CDF of a finite Gaussian mixture, so ``g'`` is a positive mixture density
scaled by ``omega``.  Two regimes are provided; the "out" regime draws every
parameter from wider intervals than the "in" regime:

    parameter        in_distribution     out_distribution
    components N     [2, 5]              [2, 10]
    centers mu_n     Normal(0.5, 0.2)    Normal(0.5, 0.3)
    omega            [0.9, 1.1]          [0.75, 1.25]
    tau              [-0.05, 0.05]       [-0.1, 0.1]

Mixture widths w_n are drawn from [0.05, 0.3] in both regimes, and the
mixture weights are normalized uniform draws.

The template waveforms are reconstructions: a Gabor wave, an apodized
sawtooth, and an apodized square (unit energy, windowed to a compact
support inside [0, 1]), plus a six-template bank of two frequency variants
per family for the three-class proof-of-concept corpus.
"""

import json
import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy.special import ndtr

from .errors import GenerationError, UnknownTemplate
from .signals import LabeledDataset, Signal
from .transform import apply_warp

__all__ = [
    "WarpSpec",
    "SynthConfig",
    "REGIMES",
    "template",
    "proof_of_concept_templates",
    "prototype_templates",
    "sample_warp",
    "generate",
]

REGIMES = {
    "in_distribution": {
        "component_count": (2, 5),
        "mean_std": 0.2,
        "omega_interval": (0.9, 1.1),
        "tau_interval": (-0.05, 0.05),
    },
    "out_distribution": {
        "component_count": (2, 10),
        "mean_std": 0.3,
        "omega_interval": (0.75, 1.25),
        "tau_interval": (-0.1, 0.1),
    },
}

_REJECTION_LIMIT = 1000


@dataclass(frozen=True, eq=False)
class WarpSpec:
    """Monotone warp ``omega * zeta(t) + tau`` with a Gaussian-mixture zeta."""

    omega: float
    tau: float
    weights: np.ndarray
    means: np.ndarray
    widths: np.ndarray

    def __post_init__(self):
        weights = np.atleast_1d(np.asarray(self.weights, dtype=np.float64))
        means = np.atleast_1d(np.asarray(self.means, dtype=np.float64))
        widths = np.atleast_1d(np.asarray(self.widths, dtype=np.float64))
        if not (weights.size == means.size == widths.size):
            raise ValueError("weights, means and widths must have equal length")
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if np.any(weights <= 0) or np.any(widths <= 0):
            raise ValueError("weights and widths must be positive")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        for arr in (weights, means, widths):
            arr.flags.writeable = False
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "widths", widths)

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        z = (t[..., None] - self.means) / self.widths
        return self.omega * (ndtr(z) @ self.weights) + self.tau

    def derivative(self, t):
        t = np.asarray(t, dtype=np.float64)
        z = (t[..., None] - self.means) / self.widths
        pdf = np.exp(-0.5 * z * z) / (math.sqrt(2.0 * math.pi) * self.widths)
        return self.omega * (pdf @ self.weights)

    def min_slope(self, t):
        return float(np.min(self.derivative(t)))


@dataclass(frozen=True)
class SynthConfig:
    """Sampling intervals and corpus size for one generation run.

    Interval fields left as ``None`` are filled in from ``REGIMES[regime]``.
    """

    regime: str = "in_distribution"
    samples_per_template: int = 8
    seed: int = 0
    component_count: tuple = None
    mean_center: float = 0.5
    mean_std: float = None
    omega_interval: tuple = None
    tau_interval: tuple = None
    width_interval: tuple = (0.05, 0.3)

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime: {self.regime!r}")
        defaults = REGIMES[self.regime]
        for name in ("component_count", "mean_std", "omega_interval", "tau_interval"):
            if getattr(self, name) is None:
                object.__setattr__(self, name, defaults[name])
        if self.samples_per_template < 1:
            raise ValueError("samples_per_template must be at least 1")
        for name in ("component_count", "omega_interval", "tau_interval", "width_interval"):
            lo, hi = getattr(self, name)
            if not (lo <= hi):
                raise ValueError(f"{name} bounds are not ordered")

    def to_json(self):
        doc = asdict(self)
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        for name in ("component_count", "omega_interval", "tau_interval", "width_interval"):
            if doc.get(name) is not None:
                doc[name] = tuple(doc[name])
        return cls(**doc)


# Compact apodization window: warps keep events inside the domain, and the
# steep edge decay makes mass loss negligible if a warp range barely misses
# the support.
_SUPPORT = (0.35, 0.65)


def _envelope(t):
    a, b = _SUPPORT
    x = (t - a) / (b - a)
    inside = (x > 0.0) & (x < 1.0)
    return np.where(inside, np.sin(math.pi * np.clip(x, 0.0, 1.0)) ** 4, 0.0)


def _unit_energy(samples, dt):
    energy = dt * (np.sum(samples**2) - 0.5 * (samples[0] ** 2 + samples[-1] ** 2))
    return samples / math.sqrt(energy)


def _gabor(t, freq):
    # sine phase keeps the waveform odd about the center (zero mean exactly)
    return _envelope(t) * np.sin(2.0 * math.pi * freq * (t - 0.5))


def _sawtooth(t, freq):
    phase = freq * (t - 0.5)
    return _envelope(t) * 2.0 * (phase - np.round(phase))


def _square(t, freq):
    return _envelope(t) * np.sign(np.sin(2.0 * math.pi * freq * (t - 0.5)))


# Two frequency variants per waveform family; the proof-of-concept corpus
# uses one family per class.  Warps preserve lobe counts, so the variants
# are genuinely distinct orbits, and family frequencies are spread far
# enough apart that dilations cannot map one class's lobe pattern onto
# another's.
_PAIR_PARAMS = {
    (0, 0): (_gabor, 9.0),
    (0, 1): (_gabor, 12.0),
    (1, 0): (_sawtooth, 3.0),
    (1, 1): (_sawtooth, 5.0),
    (2, 0): (_square, 6.0),
    (2, 1): (_square, 7.0),
}


def template(kind, n):
    """Deterministic unit-energy prototype on [0, 1].

    ``kind`` is one of ``gabor``, ``apodized_sawtooth``, ``apodized_square``
    or ``class_pair:c,m`` with class ``c`` in 0..2 and variant ``m`` in 0..1.
    """
    if n < 64:
        raise ValueError("templates need at least 64 samples")
    t = np.linspace(0.0, 1.0, n)
    dt = 1.0 / (n - 1)
    if kind == "gabor":
        samples = _gabor(t, 9.0)
    elif kind == "apodized_sawtooth":
        samples = _sawtooth(t, 5.0)
    elif kind == "apodized_square":
        samples = _square(t, 3.0)
    elif isinstance(kind, str) and kind.startswith("class_pair:"):
        try:
            c, m = (int(v) for v in kind.split(":", 1)[1].split(","))
            fn, freq = _PAIR_PARAMS[(c, m)]
        except (ValueError, KeyError):
            raise UnknownTemplate(f"bad class_pair spec: {kind!r}") from None
        samples = fn(t, freq)
    else:
        raise UnknownTemplate(f"unknown template kind: {kind!r}")
    return Signal(_unit_energy(samples, dt), t0=0.0, dt=dt)


def proof_of_concept_templates(n):
    """Six templates in three classes, two waveform variants per class."""
    return [
        (template(f"class_pair:{c},{m}", n), c) for c in range(3) for m in range(2)
    ]


def prototype_templates(n):
    """The three single-template classes used for distribution-shift runs."""
    kinds = ["gabor", "apodized_sawtooth", "apodized_square"]
    return [(template(kind, n), c) for c, kind in enumerate(kinds)]


def sample_warp(config, rng, check_points=513):
    """Draw one warp from the config's intervals.

    Draws whose slope is not strictly positive everywhere on a [0, 1] check
    grid are rejected and redrawn, up to a fixed limit.
    """
    grid = np.linspace(0.0, 1.0, check_points)
    lo, hi = config.component_count
    for _ in range(_REJECTION_LIMIT):
        count = int(rng.integers(lo, hi + 1))
        weights = rng.uniform(size=count)
        weights = weights / weights.sum()
        means = rng.normal(config.mean_center, config.mean_std, size=count)
        widths = rng.uniform(*config.width_interval, size=count)
        omega = float(rng.uniform(*config.omega_interval))
        tau = float(rng.uniform(*config.tau_interval))
        spec = WarpSpec(omega=omega, tau=tau, weights=weights, means=means, widths=widths)
        if spec.min_slope(grid) > 0.0:
            return spec
    raise GenerationError(
        f"no strictly increasing warp found in {_REJECTION_LIMIT} draws"
    )


def generate(templates, config):
    """Warped dataset with ``samples_per_template`` draws per template.

    Every sample is ``g' * template(g)`` for a fresh warp; the label is the
    template's class.  The output is reproducible bit for bit for a fixed
    seed.
    """
    if not templates:
        raise ValueError("at least one template is required")
    classes = sorted({c for _, c in templates})
    if classes != list(range(len(classes))):
        raise ValueError("template classes must be contiguous from 0")
    rng = np.random.default_rng(config.seed)
    signals = []
    labels = []
    for tmpl, cls in templates:
        for _ in range(config.samples_per_template):
            warp = sample_warp(config, rng)
            signals.append(apply_warp(tmpl, warp))
            labels.append(cls)
    return LabeledDataset(
        signals=tuple(signals),
        labels=np.array(labels, dtype=np.int64),
        class_count=len(classes),
    )

"""Forward and inverse signal transforms built on 1D mass transport.

The cumulative distribution transform (CDT) of a nonnegative signal is the
quantile function of its normalized mass, i.e. the inverse of its CDF taken
against a uniform reference density on [0, 1].  The signed variant (SCDT)
splits a signal into nonnegative positive and negative parts, transforms each
part, and keeps the two L1 masses so the map stays invertible:

    feature = (pos_quantiles, pos_mass, neg_quantiles, neg_mass)

A part with zero mass maps to (0, 0).  Flattened features have length
``2 Q + 2`` and are the vectors the classifier operates on.

Key property used throughout: composing a signal with a strictly increasing
warp ``g`` (as ``g' * s(g(t))``, which preserves mass) acts on the transform
as ``g^{-1}`` applied to the quantile arrays while both masses stay fixed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidFeature,
    NegativeInput,
    NonIncreasingWarp,
    ZeroMass,
)
from .signals import Signal

__all__ = [
    "TransformConfig",
    "TransportFeature",
    "cdt",
    "scdt",
    "inverse_scdt",
    "apply_warp",
]

# Relative threshold used when mass_epsilon is left unset: guards the
# zero-part branch against floating-point dust without zeroing real mass.
_EPS_SCALE = 1e-12


@dataclass(frozen=True)
class TransformConfig:
    """Transform-domain resolution and the zero-mass threshold.

    ``quantile_count`` is the number of points on the uniform [0, 1] grid the
    quantile functions are sampled on; ``None`` means "use the signal
    length".  ``mass_epsilon`` is the absolute mass below which a signed part
    is treated as zero; ``None`` selects ``1e-12 * duration * max|s|``.
    The reference density is the uniform density on [0, 1].
    """

    quantile_count: int = None
    mass_epsilon: float = None

    def __post_init__(self):
        if self.quantile_count is not None and self.quantile_count < 8:
            raise ValueError("quantile_count must be at least 8")
        if self.mass_epsilon is not None and self.mass_epsilon < 0:
            raise ValueError("mass_epsilon must be nonnegative")

    def resolve_quantile_count(self, signal):
        return self.quantile_count if self.quantile_count is not None else signal.n

    def resolve_mass_epsilon(self, signal):
        if self.mass_epsilon is not None:
            return self.mass_epsilon
        duration = signal.grid.end - signal.t0
        peak = float(np.max(np.abs(signal.samples)))
        return _EPS_SCALE * duration * peak


@dataclass(frozen=True, eq=False)
class TransportFeature:
    """SCDT of a signal: two quantile arrays plus the two part masses."""

    pos_quantiles: np.ndarray
    pos_mass: float
    neg_quantiles: np.ndarray
    neg_mass: float

    def __post_init__(self):
        pos = np.asarray(self.pos_quantiles, dtype=np.float64)
        neg = np.asarray(self.neg_quantiles, dtype=np.float64)
        if pos.ndim != 1 or neg.ndim != 1 or pos.size != neg.size:
            raise InvalidFeature("quantile arrays must be 1D with equal length")
        for name, q in (("pos", pos), ("neg", neg)):
            if np.any(np.diff(q) < 0):
                raise InvalidFeature(f"{name}_quantiles must be nondecreasing")
        if self.pos_mass < 0 or self.neg_mass < 0:
            raise InvalidFeature("masses must be nonnegative")
        if self.pos_mass == 0 and np.any(pos != 0):
            raise InvalidFeature("zero-mass positive part must have zero quantiles")
        if self.neg_mass == 0 and np.any(neg != 0):
            raise InvalidFeature("zero-mass negative part must have zero quantiles")
        pos = pos.copy()
        neg = neg.copy()
        pos.flags.writeable = False
        neg.flags.writeable = False
        object.__setattr__(self, "pos_quantiles", pos)
        object.__setattr__(self, "neg_quantiles", neg)

    @property
    def quantile_count(self):
        return self.pos_quantiles.size

    def flatten(self):
        """Feature vector [pos_quantiles | pos_mass | neg_quantiles | neg_mass]."""
        return np.concatenate(
            [
                self.pos_quantiles,
                [self.pos_mass],
                self.neg_quantiles,
                [self.neg_mass],
            ]
        )

    @classmethod
    def from_flat(cls, vec):
        vec = np.asarray(vec, dtype=np.float64)
        if vec.ndim != 1 or vec.size < 18 or vec.size % 2 != 0:
            raise InvalidFeature("flat feature must have length 2Q + 2, Q >= 8")
        q = (vec.size - 2) // 2
        return cls(
            pos_quantiles=vec[:q],
            pos_mass=float(vec[q]),
            neg_quantiles=vec[q + 1 : 2 * q + 1],
            neg_mass=float(vec[2 * q + 1]),
        )


def _cumtrapz(values, dt):
    """Cumulative trapezoidal integral on a uniform grid, starting at 0."""
    inner = np.cumsum(dt * 0.5 * (values[1:] + values[:-1]))
    return np.concatenate([[0.0], inner])


def _invert_cdf(cdf, times, probs):
    """Leftmost t with CDF(t) >= p, for a piecewise-linear nondecreasing CDF.

    p = 0 maps to the support start (the limit p -> 0+), not the domain
    start, so quantiles of compactly supported signals stay inside the
    support and transform consistently under warps.
    """
    idx = np.searchsorted(cdf, probs, side="left")
    idx = np.clip(idx, 0, cdf.size - 1)
    lo = np.maximum(idx - 1, 0)
    span = cdf[idx] - cdf[lo]
    safe = np.where(span > 0, span, 1.0)
    frac = np.where(span > 0, (probs - cdf[lo]) / safe, 0.0)
    out = times[lo] + frac * (times[idx] - times[lo])
    out = np.where(idx == 0, times[0], out)
    support_start = times[max(int(np.searchsorted(cdf, 0.0, side="right")) - 1, 0)]
    out = np.where(probs == 0.0, support_start, out)
    # monotone up to rounding by construction; enforce exactly
    out = np.maximum.accumulate(out)
    return np.clip(out, times[0], times[-1])


def _quantile_grid(count):
    return np.linspace(0.0, 1.0, count)


def cdt(signal, config=None):
    """Quantile function of a nonnegative signal against the uniform reference.

    Returns the transform sampled at ``y_i = i / (Q - 1)``: the value at
    ``y`` is the leftmost ``t`` where the normalized cumulative integral of
    the signal reaches ``y``.  The output is nondecreasing and stays inside
    the signal domain.
    """
    config = config or TransformConfig()
    samples = signal.samples
    if np.any(samples < 0):
        raise NegativeInput("cdt requires a nonnegative signal")
    cumulative = _cumtrapz(samples, signal.dt)
    mass = cumulative[-1]
    if mass <= config.resolve_mass_epsilon(signal):
        raise ZeroMass("signal mass is at or below the zero threshold")
    # dividing by the accumulated value itself makes the CDF tail exactly 1
    cdf = cumulative / mass
    count = config.resolve_quantile_count(signal)
    return _invert_cdf(cdf, signal.times(), _quantile_grid(count))


def scdt(signal, config=None):
    """Signed transform: CDT and L1 mass of each nonnegative part.

    Parts whose mass is at or below the zero threshold contribute
    ``(zeros, 0)``.
    """
    config = config or TransformConfig()
    count = config.resolve_quantile_count(signal)
    eps = config.resolve_mass_epsilon(signal)
    parts = []
    for part in (np.maximum(signal.samples, 0.0), np.maximum(-signal.samples, 0.0)):
        cumulative = _cumtrapz(part, signal.dt)
        mass = cumulative[-1]
        if mass <= eps:
            parts.append((np.zeros(count), 0.0))
            continue
        quantiles = _invert_cdf(
            cumulative / mass, signal.times(), _quantile_grid(count)
        )
        parts.append((quantiles, float(mass)))
    (pos_q, pos_m), (neg_q, neg_m) = parts
    return TransportFeature(pos_q, pos_m, neg_q, neg_m)


def _cdf_from_quantiles(quantiles, probs, where):
    """CDF values at ``where`` recovered from a nondecreasing quantile array.

    Linear between distinct quantile values; flats in the quantile array
    become jumps of the CDF (handled by taking the rightmost probability).
    """
    j = np.searchsorted(quantiles, where, side="right")
    out = np.empty(where.shape)
    out[j == 0] = 0.0
    out[j == quantiles.size] = 1.0
    mid = (j > 0) & (j < quantiles.size)
    jm = j[mid]
    q_lo = quantiles[jm - 1]
    q_hi = quantiles[jm]
    p_lo = probs[jm - 1]
    p_hi = probs[jm]
    out[mid] = p_lo + (where[mid] - q_lo) / (q_hi - q_lo) * (p_hi - p_lo)
    return out


def _part_density(quantiles, mass, grid):
    if mass == 0.0:
        return np.zeros(grid.n)
    if np.any(np.diff(quantiles) < 0):
        raise InvalidFeature("quantile array must be nondecreasing")
    probs = _quantile_grid(quantiles.size)
    edges = grid.t0 + grid.dt * (np.arange(grid.n + 1) - 0.5)
    cdf = _cdf_from_quantiles(quantiles, probs, edges)
    return mass * np.diff(cdf) / grid.dt


def inverse_scdt(feature, grid):
    """Reconstruct a signal from its transform on the given output grid.

    Each part's quantile array is inverted back to a CDF, differenced into a
    density over the grid cells, and scaled by the stored mass; the signal is
    the positive part minus the negative part.
    """
    pos = _part_density(feature.pos_quantiles, feature.pos_mass, grid)
    neg = _part_density(feature.neg_quantiles, feature.neg_mass, grid)
    return Signal(pos - neg, t0=grid.t0, dt=grid.dt)


def apply_warp(signal, warp, warp_derivative=None):
    """Mass-preserving composition ``g'(t) * s(g(t))`` on the signal's grid.

    ``warp`` maps an array of times to warped times and must be strictly
    increasing on the domain (checked numerically).  The derivative is taken
    from ``warp_derivative``, from a ``derivative`` attribute on ``warp``, or
    by second-order finite differences.  The signal is evaluated by linear
    interpolation with zero extension outside its domain.
    """
    times = signal.times()
    warped_times = np.asarray(warp(times), dtype=np.float64)
    if warp_derivative is not None:
        slope = np.asarray(warp_derivative(times), dtype=np.float64)
    elif hasattr(warp, "derivative"):
        slope = np.asarray(warp.derivative(times), dtype=np.float64)
    else:
        slope = np.gradient(warped_times, times)
    if np.any(slope <= 0):
        raise NonIncreasingWarp("warp derivative must be positive on the domain")
    values = np.interp(warped_times, times, signal.samples, left=0.0, right=0.0)
    return Signal(slope * values, t0=signal.t0, dt=signal.dt)

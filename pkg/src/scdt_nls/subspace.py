"""Orthonormal bases, projection residuals, and analytic subspace enrichment.

Feature vectors live in R^(2Q+2) with layout
``[pos_quantiles | pos_mass | neg_quantiles | neg_mass]``.  Enrichment adds
spanning vectors that absorb prescribed time deformations: a constant vector
for translations, and images of the members under the increasing maps

    h_n(x) = x - sin(n pi x) / (|n| pi),   n = -N..-1, 1..N

for more general warps.  Warps act only on the quantile blocks of a feature,
so enrichment vectors are zero (translation) or the identity (harmonic maps)
on the two mass coordinates.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpan, DimensionError, InvalidOrder

__all__ = [
    "EnrichmentConfig",
    "LocalSubspaceBasis",
    "harmonic_map",
    "harmonic_warp",
    "translation_vector",
    "enrichment_vectors",
    "orthonormalize",
    "residual",
]

# Singular values below this fraction of the largest are always dropped,
# independently of the variance cutoff.
_SV_FLOOR = 1e-10

_MAX_HARMONIC_ORDER = 20


@dataclass(frozen=True)
class EnrichmentConfig:
    """Which analytic spanning vectors to add to a member set.

    ``harmonic_order`` N adds the 2N harmonic-map images of every member;
    0 disables them.  Orders above 20 would oscillate below grid resolution.
    """

    use_translation: bool = True
    harmonic_order: int = 0

    def __post_init__(self):
        if not (0 <= self.harmonic_order <= _MAX_HARMONIC_ORDER):
            raise ValueError(
                f"harmonic_order must be in [0, {_MAX_HARMONIC_ORDER}]"
            )

    def vectors_per_member(self):
        return 2 * self.harmonic_order


@dataclass(frozen=True, eq=False)
class LocalSubspaceBasis:
    """Orthonormal basis of an (enriched) local subspace.

    ``source_count`` is the number of spanning vectors before truncation and
    ``variance_captured`` the retained fraction of total squared singular
    values.  A rank-0 basis is allowed and projects everything to zero.
    """

    basis: np.ndarray
    source_count: int
    variance_captured: float

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=np.float64)
        if basis.ndim != 2:
            raise DimensionError("basis must be a 2D matrix")
        if basis.shape[1] > 0:
            gram = basis.T @ basis
            if np.max(np.abs(gram - np.eye(basis.shape[1]))) > 1e-8:
                raise DimensionError("basis columns are not orthonormal")
        basis = basis.copy()
        basis.flags.writeable = False
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def rank(self):
        return self.basis.shape[1]

    @classmethod
    def empty(cls, dim):
        return cls(np.zeros((dim, 0)), source_count=0, variance_captured=1.0)


def _split_blocks(dim):
    if dim < 4 or dim % 2 != 0:
        raise DimensionError("feature dimension must be 2Q + 2")
    q = (dim - 2) // 2
    return q, np.array([q, dim - 1])


def harmonic_map(order, x):
    """The increasing map x - sin(order * pi * x) / (|order| * pi)."""
    if order == 0:
        raise InvalidOrder("order must be nonzero")
    return x - np.sin(order * math.pi * x) / (abs(order) * math.pi)


def harmonic_warp(order, vec):
    """Apply :func:`harmonic_map` to the quantile coordinates of a feature.

    The two mass coordinates pass through unchanged.
    """
    vec = np.asarray(vec, dtype=np.float64)
    _, mass_idx = _split_blocks(vec.size)
    out = harmonic_map(order, vec)
    out[mass_idx] = vec[mass_idx]
    return out


def translation_vector(dim):
    """Ones on the quantile coordinates, zeros on the mass coordinates."""
    _, mass_idx = _split_blocks(dim)
    u = np.ones(dim)
    u[mass_idx] = 0.0
    return u


def enrichment_vectors(members, config):
    """Spanning vectors absorbing translations and harmonic warps.

    Returns the translation vector (if enabled) followed by the harmonic-map
    images of every member for orders ``-N..-1, 1..N``.
    """
    members = [np.asarray(m, dtype=np.float64) for m in members]
    if not members:
        raise DimensionError("member set must be nonempty")
    dim = members[0].size
    for m in members:
        if m.ndim != 1 or m.size != dim:
            raise DimensionError("members must share one dimension")
    _split_blocks(dim)
    vectors = []
    if config.use_translation:
        vectors.append(translation_vector(dim))
    orders = [n for n in range(-config.harmonic_order, config.harmonic_order + 1) if n]
    for m in members:
        for n in orders:
            vectors.append(harmonic_warp(n, m))
    return vectors


def orthonormalize(vectors, variance_cutoff=0.99):
    """SVD basis of a spanning set, truncated by captured variance.

    Keeps the smallest leading set of left singular vectors whose squared
    singular values reach ``variance_cutoff`` of the total; singular values
    below ``1e-10 * sigma_max`` are always dropped.
    """
    if not (0.0 < variance_cutoff <= 1.0):
        raise ValueError("variance_cutoff must lie in (0, 1]")
    vectors = [np.asarray(v, dtype=np.float64) for v in vectors]
    if not vectors:
        raise DegenerateSpan("no spanning vectors given")
    dim = vectors[0].size
    for v in vectors:
        if v.ndim != 1 or v.size != dim:
            raise DimensionError("spanning vectors must share one dimension")
    matrix = np.column_stack(vectors)
    left, sigma, _ = np.linalg.svd(matrix, full_matrices=False)
    if sigma.size == 0 or sigma[0] <= 0.0:
        raise DegenerateSpan("all spanning vectors are zero")
    energy = np.cumsum(sigma**2)
    ratio = energy / energy[-1]
    rank_cutoff = int(np.searchsorted(ratio, variance_cutoff - 1e-15) + 1)
    rank_floor = int(np.sum(sigma >= _SV_FLOOR * sigma[0]))
    rank = max(1, min(rank_cutoff, rank_floor))
    return LocalSubspaceBasis(
        basis=left[:, :rank],
        source_count=len(vectors),
        variance_captured=float(ratio[rank - 1]),
    )


def residual(x, basis):
    """Squared distance from ``x`` to the span of the basis columns."""
    x = np.asarray(x, dtype=np.float64)
    b = basis.basis
    if x.ndim != 1 or x.size != b.shape[0]:
        raise DimensionError(
            f"vector has dimension {x.size}, basis expects {b.shape[0]}"
        )
    diff = x - b @ (b.T @ x)
    return float(diff @ diff)

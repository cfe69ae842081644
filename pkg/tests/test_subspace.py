import math

import numpy as np
import pytest

from scdt_nls import (
    EnrichmentConfig,
    apply_warp,
    enrichment_vectors,
    harmonic_map,
    harmonic_warp,
    orthonormalize,
    residual,
    scdt,
    translation_vector,
)
from scdt_nls.errors import DegenerateSpan, DimensionError, InvalidOrder

from helpers import lstsq_residual, signed_wave


def feature_of(signal):
    return scdt(signal).flatten()


class TestHarmonicMap:
    def test_order_zero_rejected(self):
        with pytest.raises(InvalidOrder):
            harmonic_map(0, np.zeros(3))

    def test_zero_maps_to_zero(self):
        vec = np.zeros(34)
        assert np.all(harmonic_warp(1, vec) == 0.0)

    def test_sin_pi_vanishes(self):
        assert harmonic_map(1, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_order_two_value(self):
        # 0.25 - sin(pi/2) / (2 pi)
        expected = 0.25 - 1.0 / (2.0 * math.pi)
        assert harmonic_map(2, 0.25) == pytest.approx(expected, abs=1e-15)

    def test_mass_coordinates_pass_through(self):
        vec = np.full(10, 0.37)
        out = harmonic_warp(3, vec)
        q = (10 - 2) // 2
        assert out[q] == 0.37
        assert out[-1] == 0.37
        assert not np.allclose(out[:q], 0.37)

    def test_odd_order_pair_sums_to_double(self):
        rng = np.random.default_rng(0)
        vec = rng.uniform(0, 1, 18)
        total = harmonic_warp(-1, vec) + harmonic_warp(1, vec)
        np.testing.assert_allclose(total, 2 * vec, atol=1e-12)

    def test_monotone_on_unit_interval(self):
        x = np.linspace(0, 1, 2001)
        for order in (-3, -1, 1, 2, 5):
            values = harmonic_map(order, x)
            assert np.all(np.diff(values) > 0)


class TestEnrichmentVectors:
    def test_order_cap(self):
        with pytest.raises(ValueError):
            EnrichmentConfig(True, 21)
        with pytest.raises(ValueError):
            EnrichmentConfig(True, -1)

    def test_translation_only(self):
        members = [np.arange(10.0) for _ in range(3)]
        out = enrichment_vectors(members, EnrichmentConfig(True, 0))
        assert len(out) == 1
        np.testing.assert_array_equal(out[0], translation_vector(10))

    def test_counts_with_harmonics(self):
        members = [np.linspace(0, 1, 10) for _ in range(3)]
        out = enrichment_vectors(members, EnrichmentConfig(True, 2))
        assert len(out) == 1 + 3 * 4

    def test_translation_vector_masses_zero(self):
        u = translation_vector(34)
        assert u[16] == 0.0 and u[33] == 0.0
        assert u.sum() == 32.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            enrichment_vectors([np.zeros(10), np.zeros(12)], EnrichmentConfig())


class TestOrthonormalize:
    def test_collinear_vectors_collapse(self):
        v = np.array([3.0, 4.0, 0.0, 0.0, 0.0, 0.0])
        basis = orthonormalize([v, v.copy()], 1.0)
        assert basis.rank == 1
        assert basis.source_count == 2

    def test_orthonormal_input_preserves_span(self):
        rng = np.random.default_rng(2)
        q, _ = np.linalg.qr(rng.normal(size=(8, 3)))
        basis = orthonormalize(list(q.T), 1.0)
        p1 = q @ q.T
        p2 = basis.basis @ basis.basis.T
        assert np.max(np.abs(p1 - p2)) <= 1e-8

    def test_rank4_reconstruction(self):
        rng = np.random.default_rng(3)
        vectors = [rng.normal(size=10) for _ in range(4)]
        basis = orthonormalize(vectors, 0.99)
        gram = basis.basis.T @ basis.basis
        assert np.max(np.abs(gram - np.eye(basis.rank))) <= 1e-10
        matrix = np.column_stack(vectors)
        sigma = np.linalg.svd(matrix, compute_uv=False)
        dropped = np.sum(sigma[basis.rank :] ** 2)
        for v in vectors:
            err = v - basis.basis @ (basis.basis.T @ v)
            assert err @ err <= dropped + 1e-10

    def test_all_zero_rejected(self):
        with pytest.raises(DegenerateSpan):
            orthonormalize([np.zeros(5), np.zeros(5)], 0.99)

    def test_variance_cutoff_truncates(self):
        strong = np.array([10.0, 0, 0, 0.0])
        weak = np.array([0.0, 1e-3, 0, 0.0])
        basis = orthonormalize([strong, weak], 0.99)
        assert basis.rank == 1
        assert basis.variance_captured >= 0.99


class TestResidual:
    def test_in_span_is_zero(self):
        rng = np.random.default_rng(4)
        basis = orthonormalize([rng.normal(size=6) for _ in range(2)], 1.0)
        x = basis.basis[:, 0]
        assert residual(x, basis) == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_vector_keeps_norm(self):
        basis = orthonormalize([np.array([1.0, 0, 0, 0.0])], 1.0)
        x = np.array([0.0, 2.0, 0, 0.0])
        assert residual(x, basis) == pytest.approx(4.0, abs=1e-12)

    def test_matches_normal_equations(self):
        rng = np.random.default_rng(5)
        vectors = [rng.normal(size=12) for _ in range(4)]
        basis = orthonormalize(vectors, 1.0)
        for _ in range(5):
            x = rng.normal(size=12)
            expected = lstsq_residual(x, vectors)
            assert residual(x, basis) == pytest.approx(expected, rel=1e-8, abs=1e-12)

    def test_dimension_mismatch(self):
        basis = orthonormalize([np.ones(4)], 1.0)
        with pytest.raises(DimensionError):
            residual(np.ones(5), basis)

    def test_projector_idempotent(self):
        rng = np.random.default_rng(6)
        basis = orthonormalize([rng.normal(size=10) for _ in range(3)], 1.0)
        x = rng.normal(size=10)
        projected = basis.basis @ (basis.basis.T @ x)
        assert residual(projected, basis) <= 1e-9 * float(x @ x)


class TestTranslationAbsorption:
    def test_shifted_signal_stays_in_enriched_span(self):
        # both signed parts must be nonzero for the shift to act as +mu on
        # every quantile coordinate
        s = signed_wave(n=1024, center=0.5, width=0.35, freq=4.0)
        feature = feature_of(s)
        vectors = [feature] + enrichment_vectors([feature], EnrichmentConfig(True, 0))
        basis = orthonormalize(vectors, 1.0)
        for mu in (-0.1, -0.05, 0.02, 0.05, 0.1):
            shifted = apply_warp(s, lambda t, m=mu: t - m)
            shifted_feature = feature_of(shifted)
            norm2 = float(shifted_feature @ shifted_feature)
            assert residual(shifted_feature, basis) <= 1e-4 * norm2

"""Test PPT verdicts and local support profiles"""
import numpy as np
import pytest

from models import DensityOperator, Party, PptVerdict, TriDims
from ppt.ppt_support import (
    PARTITION_LABELS, compress_to_support, embed_from_support, local_support,
    min_pt_eigenvalue, ppt_check, ppt_threshold
)
from statezoo.generators import haar_unitary, make_rng, npt_mixture, random_separable_state
from tensor.tensor_core import apply_local_filter, kron3, product_vector
from tests.conftest import basis, projector, random_density


class TestPptCheck:
    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_maximally_mixed(self, n):
        dims = TriDims(2, 3, n)
        report = ppt_check(DensityOperator(dims, np.eye(dims.total) / dims.total))
        assert report.verdict == PptVerdict.PPT
        assert report.is_ppt
        assert tuple(report.min_eigenvalues) == PARTITION_LABELS
        for value in report.min_eigenvalues.values():
            assert value == pytest.approx(1 / dims.total)

    def test_pure_product(self):
        v = product_vector(np.array([1, 1j]) / np.sqrt(2), basis(3, 1), np.array([0.6, 0.8]))
        report = ppt_check(DensityOperator(TriDims(2, 3, 2), projector(v.amplitudes)))
        assert report.is_ppt
        assert report.plain_min_eigenvalue == pytest.approx(0.0, abs=1e-12)

    def test_separable_states_are_ppt(self):
        for seed in range(10):
            rho, _ = random_separable_state(TriDims(2, 3, 3), k=4, seed=seed)
            assert ppt_check(rho).is_ppt

    def test_entangled_mixture_above_threshold(self):
        report = ppt_check(npt_mixture(TriDims(2, 3, 2), 0.5))
        assert report.verdict == PptVerdict.NPT
        assert report.min_eigenvalues["A"] == pytest.approx(-0.5 / 2 + 0.5 / 12)

    def test_non_positive_operator_is_npt(self):
        entries = np.diag([1.0] + [0.0] * 10 + [-0.01])
        report = ppt_check(DensityOperator(TriDims(2, 3, 2), entries, normalized=False))
        assert report.verdict == PptVerdict.NPT
        assert report.plain_min_eigenvalue == pytest.approx(-0.01)

    def test_tolerance_override(self):
        entries = np.eye(12) / 12
        entries[0, 0] = -1e-7
        report = ppt_check(DensityOperator(TriDims(2, 3, 2), entries, normalized=False), tol=1e-6)
        assert report.is_ppt
        assert report.tol == 1e-6

    def test_tolerance_scales_with_trace(self):
        entries = 1e6 * np.eye(12) / 12
        entries[0, 0] = -1e-5
        assert ppt_check(DensityOperator(TriDims(2, 3, 2), entries, normalized=False)).is_ppt
        small = np.eye(12) / 12
        small[0, 0] = -1e-5
        report = ppt_check(DensityOperator(TriDims(2, 3, 2), small, normalized=False))
        assert report.verdict == PptVerdict.NPT

    def test_local_unitary_invariance(self):
        rho = npt_mixture(TriDims(2, 3, 2), 0.3)
        rng = make_rng(4)
        rotated = apply_local_filter(rho, haar_unitary(2, rng), haar_unitary(3, rng), haar_unitary(2, rng))
        for label in ("A", "B", "C"):
            subset = Party[label]
            assert min_pt_eigenvalue(rotated, subset) == pytest.approx(min_pt_eigenvalue(rho, subset), abs=1e-12)


class TestPptThreshold:
    def test_bisected_threshold(self):
        dims = TriDims(2, 3, 2)
        threshold = ppt_threshold(lambda p: npt_mixture(dims, p))
        assert threshold == pytest.approx(1 / 7, abs=1e-10)

    def test_scan_agrees_with_bisection(self):
        dims = TriDims(2, 3, 2)
        grid = np.arange(0.0, 1.0 + 1e-9, 1e-3)
        first_negative = next(p for p in grid if min_pt_eigenvalue(npt_mixture(dims, p), Party.A) < 0)
        assert abs(first_negative - 1 / 7) <= 1e-3

    def test_no_sign_change(self):
        dims = TriDims(2, 3, 2)
        with pytest.raises(ValueError):
            ppt_threshold(lambda p: npt_mixture(dims, p), lo=0.0, hi=0.1)


class TestLocalSupport:
    def test_full_support(self, mixed_234):
        profile = local_support(mixed_234)
        assert profile.local_dims == (2, 3, 4)
        assert profile.is_full(mixed_234.dims)
        for isometry, dim in zip(profile.isometries, (2, 3, 4)):
            assert np.allclose(isometry, np.eye(dim))

    def test_product_support(self):
        v = product_vector(basis(2, 0), np.array([1, 1, 0]) / np.sqrt(2), basis(4, 3))
        profile = local_support(DensityOperator(TriDims(2, 3, 4), projector(v.amplitudes)))
        assert profile.local_dims == (1, 1, 1)

    def test_compress_embed_round_trip(self):
        dims = TriDims(2, 3, 4)
        inner = random_density(TriDims(2, 3, 2), seed=5)
        pad = np.zeros((4, 2), dtype=complex)
        pad[1, 0] = pad[3, 1] = 1.0
        rho = DensityOperator(dims, kron3(np.eye(2), np.eye(3), pad) @ inner.entries @ kron3(np.eye(2), np.eye(3), pad).T)
        profile = local_support(rho)
        assert profile.local_dims == (2, 3, 2)
        compressed = compress_to_support(rho, profile)
        assert compressed.dims == TriDims(2, 3, 2)
        assert np.trace(compressed.entries).real == pytest.approx(1.0)
        assert np.allclose(embed_from_support(compressed, profile, dims).entries, rho.entries, atol=1e-12)

    def test_embed_rejects_wrong_dims(self, mixed_234):
        profile = local_support(mixed_234)
        with pytest.raises(ValueError):
            embed_from_support(random_density(TriDims(2, 3, 2), seed=1), profile, mixed_234.dims)

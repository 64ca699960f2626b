"""Test tensor index conventions, partial transposes and local filters"""
import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from exceptions import DimsError, FilterSingularError, SubsetError
from models import DensityOperator, Party, TriDims
from tensor.tensor_core import (
    apply_local_filter, block_grid, conditional_operator, flat_index, frobenius_close,
    from_block_grid, partial_transpose, product_vector, reduced_operator
)
from tests.conftest import basis, projector, random_density


class TestFlatIndex:
    def test_examples(self, dims_234):
        assert flat_index(0, 0, 0, dims_234) == 0
        assert flat_index(0, 0, 3, dims_234) == 3
        assert flat_index(0, 1, 0, dims_234) == 4
        assert flat_index(1, 0, 0, dims_234) == 12
        assert flat_index(1, 2, 3, dims_234) == 23

    def test_out_of_range(self, dims_234):
        with pytest.raises(IndexError):
            flat_index(2, 0, 0, dims_234)
        with pytest.raises(IndexError):
            flat_index(0, 0, 4, dims_234)


class TestProductVector:
    def test_basis_ket(self, dims_234):
        v = product_vector(basis(2, 1), basis(3, 2), basis(4, 0))
        expected = np.zeros(24)
        expected[flat_index(1, 2, 0, dims_234)] = 1
        assert np.allclose(v.amplitudes, expected)

    def test_amplitudes_and_norm(self):
        a = np.array([1, 1j]) / np.sqrt(2)
        b = np.array([1, 0, 2])
        c = np.array([0.5, -1])
        v = product_vector(a, b, c)
        dims = TriDims(2, 3, 2)
        assert v.dims == dims
        for i in range(2):
            for j in range(3):
                for k in range(2):
                    assert v.amplitudes[flat_index(i, j, k, dims)] == pytest.approx(a[i] * b[j] * c[k])
        assert v.norm == pytest.approx(np.linalg.norm(b) * np.linalg.norm(c))

    def test_declared_dims_mismatch(self):
        with pytest.raises(DimsError):
            product_vector(np.ones(2), np.ones(3), np.ones(3), dims=TriDims(2, 3, 4))


class TestPartialTranspose:
    def test_identity_is_fixed(self, dims_234):
        rho = DensityOperator(dims_234, np.eye(24) / 24)
        for subset in (Party.A, Party.B, Party.C, Party.AB, Party.AC, Party.BC):
            assert np.allclose(partial_transpose(rho, subset).entries, rho.entries)

    def test_product_state(self):
        a = np.array([1, 1j]) / np.sqrt(2)
        b = np.array([1, 2j, 0]) / np.sqrt(5)
        c = np.array([1j, 1]) / np.sqrt(2)
        rho = DensityOperator(TriDims(2, 3, 2), projector(product_vector(a, b, c).amplitudes))
        transposed = partial_transpose(rho, Party.B)
        expected = np.kron(np.kron(projector(a), projector(b).T), projector(c))
        assert np.allclose(transposed.entries, expected)
        assert transposed.normalized is False

    def test_composition(self, mixed_234):
        twice = partial_transpose(partial_transpose(mixed_234, Party.A), Party.B)
        assert np.allclose(twice.entries, partial_transpose(mixed_234, Party.AB).entries)

    def test_complement_is_full_transpose(self, mixed_234):
        left = partial_transpose(mixed_234, Party.A).entries
        right = partial_transpose(mixed_234, Party.BC).entries
        assert np.allclose(left, right.T)

    def test_trace_preserved(self, mixed_234):
        assert partial_transpose(mixed_234, Party.C).trace == pytest.approx(1.0)

    @pytest.mark.parametrize("subset", [Party.NONE, Party.ABC])
    def test_improper_subset(self, mixed_234, subset):
        with pytest.raises(SubsetError):
            partial_transpose(mixed_234, subset)

    @hyp_settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000), subset=st.sampled_from(
        [Party.A, Party.B, Party.C, Party.AB, Party.AC, Party.BC]))
    def test_involution(self, seed, subset):
        rho = random_density(TriDims(2, 3, 3), seed)
        back = partial_transpose(partial_transpose(rho, subset), subset)
        assert np.allclose(back.entries, rho.entries, atol=1e-14)


class TestConditionalOperator:
    def test_pinning_charlie_block(self):
        # |12><12| ⊗ F on 2x3x2, pin A=|1>, B=|2> recovers F
        f = np.array([[2, 1j], [-1j, 1]]) / 3
        entries = np.kron(projector(np.kron(basis(2, 1), basis(3, 2))), f)
        rho = DensityOperator(TriDims(2, 3, 2), entries)
        got = conditional_operator(rho, {Party.A: basis(2, 1), Party.B: basis(3, 2)})
        assert np.allclose(got, f)

    def test_orthogonal_pin_is_zero(self):
        entries = np.kron(projector(np.kron(basis(2, 1), basis(3, 2))), np.eye(2) / 2)
        rho = DensityOperator(TriDims(2, 3, 2), entries)
        got = conditional_operator(rho, {Party.A: basis(2, 0), Party.B: basis(3, 2)})
        assert np.allclose(got, 0)

    def test_summing_over_basis_gives_marginal(self, mixed_234):
        total = sum(conditional_operator(mixed_234, {Party.A: basis(2, i)}) for i in range(2))
        assert np.allclose(total, reduced_operator(mixed_234, Party.BC))
        assert np.trace(total).real == pytest.approx(1.0)

    def test_three_pins_rejected(self, mixed_234):
        with pytest.raises(SubsetError):
            conditional_operator(mixed_234, {Party.A: basis(2, 0), Party.B: basis(3, 0), Party.C: basis(4, 0)})

    def test_wrong_length(self, mixed_234):
        with pytest.raises(DimsError):
            conditional_operator(mixed_234, {Party.B: np.ones(2)})


class TestReducedOperator:
    def test_product_marginals(self):
        a = np.array([1, 1j]) / np.sqrt(2)
        b = np.array([1, 0, 1]) / np.sqrt(2)
        c = np.array([0, 1])
        rho = DensityOperator(TriDims(2, 3, 2), projector(product_vector(a, b, c).amplitudes))
        assert np.allclose(reduced_operator(rho, Party.A), projector(a))
        assert np.allclose(reduced_operator(rho, Party.B), projector(b))
        assert np.allclose(reduced_operator(rho, Party.AC), np.kron(projector(a), projector(c)))

    def test_empty_keep(self, mixed_234):
        with pytest.raises(SubsetError):
            reduced_operator(mixed_234, Party.NONE)


class TestBlockGrid:
    def test_single_corner_block(self):
        entries = np.kron(projector(np.kron(basis(2, 1), basis(3, 2))), np.eye(2) / 2)
        grid = block_grid(DensityOperator(TriDims(2, 3, 2), entries))
        for p in range(6):
            for q in range(6):
                expected = np.eye(2) / 2 if (p, q) == (5, 5) else np.zeros((2, 2))
                assert np.allclose(grid.block(p, q), expected)

    def test_hermitian_blocks_and_inverse(self):
        rho = random_density(TriDims(2, 3, 3), seed=3)
        grid = block_grid(rho)
        for p in range(6):
            for q in range(6):
                assert np.allclose(grid.block(q, p), grid.block(p, q).conj().T)
        assert np.allclose(from_block_grid(grid).entries, rho.entries)

    def test_wrong_dims(self):
        with pytest.raises(DimsError):
            block_grid(random_density(TriDims(2, 2, 2), seed=0))


class TestLocalFilter:
    def test_identity_filter(self, mixed_234):
        out = apply_local_filter(mixed_234, np.eye(2), np.eye(3), np.eye(4))
        assert np.allclose(out.entries, mixed_234.entries)

    def test_inverse_sqrt_filter_on_pivot_block(self):
        f = np.array([[2, 0.5], [0.5, 1]])
        entries = np.kron(projector(np.kron(basis(2, 1), basis(3, 2))), f)
        rho = DensityOperator(TriDims(2, 3, 2), entries)
        w, v = np.linalg.eigh(f)
        inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
        out = apply_local_filter(rho, np.eye(2), np.eye(3), inv_sqrt)
        assert np.allclose(block_grid(out).block(5, 5), np.eye(2))

    def test_rank_preserved(self):
        rho = random_density(TriDims(2, 3, 2), seed=11, rank=3)
        rng = np.random.default_rng(1)
        l_c = rng.standard_normal((2, 2)) + 2 * np.eye(2)
        out = apply_local_filter(rho, np.eye(2), np.diag([1, 2, 3]), l_c)
        assert np.linalg.matrix_rank(out.entries, tol=1e-10) == 3

    def test_singular_factor(self, mixed_234):
        with pytest.raises(FilterSingularError) as info:
            apply_local_filter(mixed_234, np.eye(2), np.diag([1.0, 1.0, 0.0]), np.eye(4))
        assert info.value.party == "B"


class TestFrobeniusClose:
    def test_small_matrices_use_absolute_scale(self):
        x = np.eye(3) * 1e-3
        assert frobenius_close(x, x + 5e-11, tol=1e-10) is False
        assert frobenius_close(x, x + 1e-11, tol=1e-10) is True

    def test_large_matrices_use_relative_scale(self):
        x = np.eye(4) * 1e6
        bumped = x.copy()
        bumped[0, 0] += 1e-5
        assert frobenius_close(x, bumped, tol=1e-10)
        bumped[0, 0] += 1e-2
        assert not frobenius_close(x, bumped, tol=1e-10)

    def test_settings_default(self, mixed_234):
        assert frobenius_close(mixed_234.entries, mixed_234.entries.conj().T)

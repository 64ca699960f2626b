"""
Tensor Core
Index conventions, product vectors, partial transposes and local filters on
C^dA ⊗ C^dB ⊗ C^dC (Alice slowest, Charlie fastest)
"""
from typing import Dict, Optional
import logging

import numpy as np

from config import settings
from exceptions import DimsError, FilterSingularError, SubsetError
from models import (
    BlockGrid, DensityOperator, Party, PARTY_ORDER, StateVector, TriDims,
    party_axes, party_label
)

logger = logging.getLogger(__name__)

_BRA = "abc"
_KET = "def"


def flat_index(i_a: int, j_b: int, k_c: int, dims: TriDims) -> int:
    """
    Flat position of the basis ket |i_A, j_B, k_C>

    Returns:
        (i_A * dB + j_B) * dC + k_C
    """
    for name, index, bound in (("i_A", i_a, dims.dA), ("j_B", j_b, dims.dB), ("k_C", k_c, dims.dC)):
        if not 0 <= index < bound:
            raise IndexError(f"{name}={index} out of range [0, {bound}) for dims {dims}")
    return (i_a * dims.dB + j_b) * dims.dC + k_c


def kron3(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Kronecker product of three factors in A, B, C order"""
    return np.kron(np.kron(x, y), z)


def product_vector(a, b, c, dims: Optional[TriDims] = None) -> StateVector:
    """
    Elementary tensor |a> ⊗ |b> ⊗ |c>

    Args:
        a, b, c: Local vectors for Alice, Bob and Charlie
        dims: Optional declared dims; lengths must match

    Returns:
        StateVector with amplitudes[flat_index(i, j, k)] = a_i b_j c_k
    """
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    c = np.asarray(c, dtype=complex).reshape(-1)
    actual = TriDims(a.size, b.size, c.size)
    if dims is not None and dims != actual:
        raise DimsError(f"Component lengths {actual} do not match dims {dims}")
    return StateVector(actual, kron3(a, b, c))


def frobenius_close(x: np.ndarray, y: np.ndarray, tol: Optional[float] = None) -> bool:
    """Frobenius comparison relative to max(1, ||x||_F)"""
    tol = settings.matrix_tol if tol is None else tol
    scale = max(1.0, float(np.linalg.norm(x)))
    return float(np.linalg.norm(np.asarray(x) - np.asarray(y))) <= tol * scale


def _check_proper(subset: Party) -> None:
    if subset == Party.NONE or subset == Party.ABC:
        raise SubsetError(
            f"Partial transpose needs a nonempty proper subset, got '{party_label(subset) or '∅'}'"
        )


def partial_transpose(rho: DensityOperator, subset: Party) -> DensityOperator:
    """
    Transpose the tensor factors of the parties in `subset`

    Returns:
        Hermitian operator with the same trace, flagged unnormalized
    """
    _check_proper(subset)
    tensor = rho.as_tensor()
    for axis in party_axes(subset):
        tensor = np.swapaxes(tensor, axis, axis + 3)
    n = rho.dims.total
    return rho.with_entries(tensor.reshape(n, n), normalized=False)


def conditional_operator(rho: DensityOperator, pinned: Dict[Party, np.ndarray]) -> np.ndarray:
    """
    Sandwich rho with vectors on the pinned parties: <v|rho|v>

    Args:
        rho: Operator on the tripartite space
        pinned: Mapping from single parties to local vectors (one or two entries)

    Returns:
        Matrix on the unpinned parties (row-major in A, B, C order)
    """
    if not 1 <= len(pinned) <= 2:
        raise SubsetError(
            "Pin one or two parties; with all three pinned use the quadratic form <v|rho|v>"
        )
    subscripts = [_BRA + _KET]
    operands = [rho.as_tensor()]
    out_bra, out_ket = "", ""
    for axis, party in enumerate(PARTY_ORDER):
        if party in pinned:
            vector = np.asarray(pinned[party], dtype=complex).reshape(-1)
            if vector.size != rho.dims.shape[axis]:
                raise DimsError(
                    f"Pinned vector for {party_label(party)} has length {vector.size}, "
                    f"expected {rho.dims.shape[axis]}"
                )
            subscripts += [_BRA[axis], _KET[axis]]
            operands += [vector.conj(), vector]
        else:
            out_bra += _BRA[axis]
            out_ket += _KET[axis]
    result = np.einsum(",".join(subscripts) + "->" + out_bra + out_ket, *operands)
    m = int(np.prod([rho.dims.shape[_BRA.index(ch)] for ch in out_bra]))
    return result.reshape(m, m)


def reduced_operator(rho: DensityOperator, keep: Party) -> np.ndarray:
    """Partial trace onto the parties in `keep`"""
    if keep == Party.NONE:
        raise SubsetError("Reduced operator needs at least one kept party")
    bra, ket, out_bra, out_ket = "", "", "", ""
    for axis, party in enumerate(PARTY_ORDER):
        if party in keep:
            bra += _BRA[axis]
            ket += _KET[axis]
            out_bra += _BRA[axis]
            out_ket += _KET[axis]
        else:
            bra += _BRA[axis]
            ket += _BRA[axis]
    result = np.einsum(f"{bra}{ket}->{out_bra}{out_ket}", rho.as_tensor())
    m = int(np.prod([rho.dims.shape[axis] for axis in party_axes(keep)]))
    return result.reshape(m, m)


def block_grid(rho: DensityOperator) -> BlockGrid:
    """
    Split a (2, 3, N) operator into its 6 x 6 grid of N x N blocks

    Block (p, q) with p = i_A * 3 + j_B is <p|rho|q> on Charlie's space.
    """
    dims = rho.dims
    if (dims.dA, dims.dB) != (2, 3):
        raise DimsError(f"Block grid needs dims (2, 3, N), got {dims}")
    n = dims.dC
    blocks = rho.entries.reshape(6, n, 6, n).transpose(0, 2, 1, 3)
    return BlockGrid(dims, blocks.copy())


def from_block_grid(grid: BlockGrid, normalized: bool = False) -> DensityOperator:
    """Inverse of block_grid"""
    n = grid.dims.dC
    entries = grid.blocks.transpose(0, 2, 1, 3).reshape(6 * n, 6 * n)
    return DensityOperator(grid.dims, entries.copy(), normalized=normalized)


def apply_local_filter(
    rho: DensityOperator,
    l_a: np.ndarray,
    l_b: np.ndarray,
    l_c: np.ndarray
) -> DensityOperator:
    """
    Apply the reversible local operation (L_A ⊗ L_B ⊗ L_C) rho (...)^†

    Raises:
        FilterSingularError: if any factor is singular
        DimsError: if a factor does not match its party's dimension
    """
    factors = []
    for party, factor, dim in zip("ABC", (l_a, l_b, l_c), rho.dims.shape):
        factor = np.asarray(factor, dtype=complex)
        if factor.shape != (dim, dim):
            raise DimsError(f"Filter factor for {party} has shape {factor.shape}, expected ({dim}, {dim})")
        condition = float(np.linalg.cond(factor))
        if not np.isfinite(condition) or condition > settings.filter_cond_max:
            raise FilterSingularError(
                f"Filter factor for {party} is singular (condition number {condition:.3e})",
                party=party,
                condition_number=condition
            )
        logger.debug(f"Filter factor {party}: condition number {condition:.3e}")
        factors.append(factor)

    local = kron3(*factors)
    return rho.with_entries(local @ rho.entries @ local.conj().T, normalized=False)

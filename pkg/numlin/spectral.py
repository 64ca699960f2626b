"""
Spectral Utilities
Tolerance-aware rank/kernel, Hermitian eigensolving and range-restricted
inverse quadratic forms
"""
from typing import Optional, Tuple
import logging

import numpy as np
import scipy.linalg

from config import settings
from exceptions import DegenerateVectorError, HermiticityError, NotInRangeError
from models import RankKernel

logger = logging.getLogger(__name__)


def rank_kernel(
    matrix: np.ndarray,
    rel_tol: Optional[float] = None,
    abs_tol: Optional[float] = None
) -> RankKernel:
    """
    Numerical rank, kernel and range from a full SVD

    The threshold is rel_tol * sigma_max * max(shape) unless an absolute
    threshold is given.

    Args:
        matrix: Complex matrix with finite entries
        rel_tol: Relative tolerance (settings.rank_rel_tol by default)
        abs_tol: Absolute singular-value threshold overriding rel_tol

    Returns:
        RankKernel with orthonormal kernel and range columns
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2:
        raise ValueError(f"rank_kernel expects a matrix, got shape {matrix.shape}")
    rows, cols = matrix.shape
    if rows == 0 or cols == 0:
        return RankKernel(0, np.eye(cols, dtype=complex), np.zeros((rows, 0), dtype=complex),
                          np.zeros(0), 0.0)

    u, s, vh = scipy.linalg.svd(matrix, full_matrices=True)
    if abs_tol is not None:
        threshold = float(abs_tol)
    else:
        rel_tol = settings.rank_rel_tol if rel_tol is None else rel_tol
        threshold = float(rel_tol * (s[0] if s.size else 0.0) * max(rows, cols))

    rank = int(np.count_nonzero(s > threshold)) if s.size and s[0] > 0 else 0
    result = RankKernel(
        rank=rank,
        kernel_basis=vh[rank:].conj().T,
        range_basis=u[:, :rank],
        singular_values=s,
        threshold=threshold
    )
    logger.debug(
        f"Rank decision {rows}x{cols}: rank={rank}, threshold={threshold:.3e}, gap={result.gap:.3e}"
    )
    return result


def null_vector(matrix: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Right singular vector for the smallest singular value

    Returns:
        (unit vector, smallest singular value); underdetermined matrices
        report 0.0
    """
    matrix = np.asarray(matrix, dtype=complex)
    _, s, vh = scipy.linalg.svd(matrix, full_matrices=True)
    rows, cols = matrix.shape
    smallest = 0.0 if rows < cols else float(s[-1])
    return vh[-1].conj(), smallest


def hermitian_eig(h: np.ndarray, tol: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decomposition of a Hermitian matrix

    The input is symmetrized as (H + H^†)/2 after the Hermiticity check.

    Returns:
        (eigenvalues ascending, unitary eigenvectors as columns)
    """
    tol = settings.hermiticity_tol if tol is None else tol
    h = np.asarray(h, dtype=complex)
    deviation = float(np.linalg.norm(h - h.conj().T))
    scale = max(1.0, float(np.linalg.norm(h)))
    if deviation > tol * scale:
        raise HermiticityError(
            f"Matrix is not Hermitian: ||H - H^†||_F = {deviation:.3e} (tol {tol * scale:.3e})",
            deviation=deviation
        )
    return scipy.linalg.eigh((h + h.conj().T) / 2)


def psd_sqrt(h: np.ndarray, inverse: bool = False, floor: float = 0.0) -> np.ndarray:
    """Square root (or inverse square root) of a positive semidefinite matrix"""
    eigenvalues, vectors = hermitian_eig(h)
    eigenvalues = np.clip(eigenvalues, floor, None)
    powers = eigenvalues ** (-0.5 if inverse else 0.5)
    return (vectors * powers) @ vectors.conj().T


def range_inverse_quadratic(
    rho: np.ndarray,
    v: np.ndarray,
    tol: Optional[float] = None,
    rel_tol: Optional[float] = None
) -> float:
    """
    Largest lambda with rho - lambda |v><v| still positive semidefinite

    Computed as 1 / <v|rho^+|v> with the pseudo-inverse restricted to the
    range of rho.

    Raises:
        DegenerateVectorError: v is numerically zero
        NotInRangeError: v has a component outside the range of rho
    """
    tol = settings.range_tol if tol is None else tol
    rho = np.asarray(rho, dtype=complex)
    v = np.asarray(v, dtype=complex).reshape(-1)
    v_norm = float(np.linalg.norm(v))
    if v_norm < 1e-14:
        raise DegenerateVectorError("Vector is numerically zero")

    eigenvalues, vectors = hermitian_eig(rho)
    rel_tol = settings.rank_rel_tol if rel_tol is None else rel_tol
    top = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    keep = eigenvalues > rel_tol * top * rho.shape[0]
    range_vectors = vectors[:, keep]

    coefficients = range_vectors.conj().T @ v
    residual = float(np.linalg.norm(v - range_vectors @ coefficients)) / v_norm
    logger.debug(f"Range projection residual {residual:.3e} (rank {int(keep.sum())})")
    if residual > tol:
        raise NotInRangeError(
            f"Vector is not in the range of the operator (projection residual {residual:.3e})",
            residual=residual
        )

    quadratic = float(np.sum(np.abs(coefficients) ** 2 / eigenvalues[keep]))
    return 1.0 / quadratic

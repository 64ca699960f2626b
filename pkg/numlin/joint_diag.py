"""
Joint Diagonalization
Common eigenbasis of commuting normal matrices via randomized Hermitian
combinations, refined inside eigenvalue clusters
"""
from typing import List, Optional, Sequence
import logging

import numpy as np
import scipy.linalg

from config import settings
from exceptions import NotCommutingError
from models import JointSpectrum

logger = logging.getLogger(__name__)


def _check_commuting_normal(ops: Sequence[np.ndarray], tol: float) -> None:
    norms = [max(1.0, float(np.linalg.norm(op))) for op in ops]
    for i, op in enumerate(ops):
        defect = float(np.linalg.norm(op @ op.conj().T - op.conj().T @ op))
        if defect > tol * norms[i] ** 2:
            raise NotCommutingError(
                f"Operator {i} is not normal: ||[M, M^†]||_F = {defect:.3e}",
                pair=(i, i),
                norm=defect
            )
    worst_pair, worst = None, 0.0
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            defect = float(np.linalg.norm(ops[i] @ ops[j] - ops[j] @ ops[i]))
            scaled = defect / (norms[i] * norms[j])
            if scaled > tol and scaled > worst:
                worst_pair, worst = (i, j), scaled
    if worst_pair is not None:
        i, j = worst_pair
        raise NotCommutingError(
            f"Operators {i} and {j} do not commute: relative ||[M_i, M_j]||_F = {worst:.3e}",
            pair=worst_pair,
            norm=worst
        )


def _clusters(values: np.ndarray, cluster_tol: float) -> List[np.ndarray]:
    """Group ascending eigenvalues whose consecutive gap is below cluster_tol * spread"""
    spread = float(values[-1] - values[0]) if values.size else 0.0
    if spread <= 0.0:
        return [np.arange(values.size)]
    threshold = cluster_tol * spread
    groups, start = [], 0
    for k in range(1, values.size):
        if values[k] - values[k - 1] >= threshold:
            groups.append(np.arange(start, k))
            start = k
    groups.append(np.arange(start, values.size))
    return groups


def _diagonalize_subspace(
    ops: Sequence[np.ndarray],
    basis: np.ndarray,
    rng: np.random.Generator,
    cluster_tol: float,
    depth: int
) -> np.ndarray:
    restricted = [basis.conj().T @ op @ basis for op in ops]
    weights = rng.standard_normal(len(ops)) + 1j * rng.standard_normal(len(ops))
    combination = sum(w * m + np.conj(w) * m.conj().T for w, m in zip(weights, restricted))
    values, vectors = scipy.linalg.eigh((combination + combination.conj().T) / 2)
    basis = basis @ vectors

    if depth >= len(ops):
        return basis
    for group in _clusters(values, cluster_tol):
        if 1 < group.size < values.size:
            logger.debug(f"Refining eigenvalue cluster of size {group.size} at depth {depth}")
            basis[:, group] = _diagonalize_subspace(ops, basis[:, group], rng, cluster_tol, depth + 1)
        elif group.size == values.size and group.size > 1 and depth + 1 < len(ops):
            # whole subspace degenerate for this draw; redraw weights
            basis = _diagonalize_subspace(ops, basis, rng, cluster_tol, depth + 1)
    return basis


def joint_diagonalize(
    ops: Sequence[np.ndarray],
    tol: Optional[float] = None,
    seed: Optional[int] = None,
    cluster_tol: Optional[float] = None
) -> JointSpectrum:
    """
    Simultaneously diagonalize commuting normal matrices

    A Hermitian combination sum_k (w_k M_k + conj(w_k) M_k^†) with random
    complex weights is diagonalized; eigenvalue clusters are refined with
    fresh weights on the cluster subspace.

    Args:
        ops: Square matrices of equal size, pairwise commuting and normal
        tol: Commutator tolerance (settings.commute_tol by default)
        seed: Seed for the weight stream (settings.default_seed by default)
        cluster_tol: Relative eigenvalue gap defining clusters

    Returns:
        JointSpectrum with eigenvalues[k, n] = <f_n|M_k|f_n>
    """
    tol = settings.commute_tol if tol is None else tol
    seed = settings.default_seed if seed is None else seed
    cluster_tol = settings.cluster_tol if cluster_tol is None else cluster_tol
    ops = [np.asarray(op, dtype=complex) for op in ops]
    if not ops:
        raise ValueError("joint_diagonalize needs at least one operator")
    n = ops[0].shape[0]
    for op in ops:
        if op.shape != (n, n):
            raise ValueError(f"All operators must be {n}x{n}, got {op.shape}")

    _check_commuting_normal(ops, tol)

    rng = np.random.Generator(np.random.PCG64(seed))
    basis = _diagonalize_subspace(ops, np.eye(n, dtype=complex), rng, cluster_tol, depth=0)

    # columns only change by phases here
    basis, _ = np.linalg.qr(basis)

    eigenvalues = np.array([np.einsum("in,ij,jn->n", basis.conj(), op, basis) for op in ops])
    residuals = []
    for k, op in enumerate(ops):
        rotated = basis.conj().T @ op @ basis
        off_diagonal = float(np.linalg.norm(rotated - np.diag(np.diag(rotated))))
        residuals.append(off_diagonal)
        bound = 10 * tol * max(1.0, float(np.linalg.norm(op)))
        if off_diagonal > bound:
            logger.warning(
                f"Joint diagonalization residual {off_diagonal:.3e} for operator {k} exceeds {bound:.3e}"
            )
    return JointSpectrum(basis=basis, eigenvalues=eigenvalues, residuals=residuals)

"""
Matrix Pencils
Roots of det(M0 + alpha M1) = 0 through the generalized eigenproblem
"""
from typing import Optional
import logging

import numpy as np
import scipy.linalg

from config import settings
from models import PencilRoots, PencilStatus

logger = logging.getLogger(__name__)

# Probe points for the identically-singular test; fixed so results are reproducible
_PROBES = (0.5173 + 0.3291j, -1.2087 + 0.8843j, 0.2719 - 1.6011j)


def _is_identically_singular(m0: np.ndarray, m1: np.ndarray, tol: float) -> bool:
    scale = max(1.0, float(np.linalg.norm(m0)), float(np.linalg.norm(m1)))
    for t in _PROBES:
        smallest = scipy.linalg.svdvals(m0 + t * m1)[-1]
        if smallest > tol * scale * (1 + abs(t)):
            return False
    return True


def pencil_roots(m0: np.ndarray, m1: np.ndarray, tol: Optional[float] = None) -> PencilRoots:
    """
    Finite roots of the pencil M0 + alpha M1

    Solves -M0 x = alpha M1 x in homogeneous form (alpha = a / b) and drops
    the pairs with b numerically zero, which correspond to roots at infinity.

    Args:
        m0: k x k complex matrix
        m1: k x k complex matrix
        tol: Relative tolerance for infinite roots and singularity detection

    Returns:
        PencilRoots; for an identically singular pencil the root list is empty
        and every alpha admits a kernel vector
    """
    tol = settings.kernel_tol if tol is None else tol
    m0 = np.asarray(m0, dtype=complex)
    m1 = np.asarray(m1, dtype=complex)
    if m0.ndim != 2 or m0.shape[0] != m0.shape[1] or m0.shape != m1.shape:
        raise ValueError(f"Pencil needs two square matrices of equal size, got {m0.shape} and {m1.shape}")

    if m0.shape[0] == 0:
        return PencilRoots(np.zeros(0, dtype=complex), PencilStatus.REGULAR)

    if _is_identically_singular(m0, m1, tol):
        logger.debug(f"Pencil of size {m0.shape[0]} is identically singular")
        return PencilRoots(np.zeros(0, dtype=complex), PencilStatus.IDENTICALLY_SINGULAR)

    homogeneous = scipy.linalg.eig(-m0, m1, right=False, homogeneous_eigvals=True)
    alphas, betas = homogeneous[0], homogeneous[1]
    pair_scale = np.maximum(np.hypot(np.abs(alphas), np.abs(betas)), np.finfo(float).tiny)
    finite = np.abs(betas) > tol * pair_scale

    roots = alphas[finite] / betas[finite]
    n_infinite = int(np.count_nonzero(~finite))
    logger.debug(f"Pencil of size {m0.shape[0]}: {roots.size} finite roots, {n_infinite} infinite")
    return PencilRoots(roots, PencilStatus.REGULAR, n_infinite)

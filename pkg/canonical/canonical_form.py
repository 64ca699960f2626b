"""
Canonical Form
Extraction of the (DC DB D C B I) outer-product form of rank-N states on
C^2 ⊗ C^3 ⊗ C^N, and assembly of states from canonical data
"""
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np

from config import settings
from exceptions import (
    DimsError, InvalidCanonicalError, NotCanonicalizableError, NotPptError,
    PivotNotFoundError, PivotRankError
)
from models import (
    BlockGrid, CanonicalForm, CanonicalResiduals, DensityOperator, Party, Pivot,
    PptReport, TriDims
)
from numlin.spectral import hermitian_eig, rank_kernel
from ppt.ppt_support import ppt_check
from tensor.tensor_core import (
    apply_local_filter, block_grid, conditional_operator, frobenius_close, kron3
)

logger = logging.getLogger(__name__)

# Row position of the identity block; also the pivot block |1_A, 2_B>
PIVOT_BLOCK = 5

COMMUTATOR_NAMES: Tuple[str, ...] = (
    "[B,B^H]", "[C,C^H]", "[D,D^H]",
    "[C,B]", "[C,B^H]", "[C,D]", "[C,D^H]",
    "[B,D]", "[B,D^H]",
)


def _dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def _commutator_pairs(B: np.ndarray, C: np.ndarray, D: np.ndarray):
    h = _dagger
    return (
        (B, h(B)), (C, h(C)), (D, h(D)),
        (C, B), (C, h(B)), (C, D), (C, h(D)),
        (B, D), (B, h(D)),
    )


def commutator_norms(B: np.ndarray, C: np.ndarray, D: np.ndarray) -> Dict[str, float]:
    """Frobenius norms of the nine commutators that must vanish"""
    return {
        name: float(np.linalg.norm(x @ y - y @ x))
        for name, (x, y) in zip(COMMUTATOR_NAMES, _commutator_pairs(B, C, D))
    }


def _scaled_commutators(B: np.ndarray, C: np.ndarray, D: np.ndarray) -> Dict[str, float]:
    scaled = {}
    for name, (x, y) in zip(COMMUTATOR_NAMES, _commutator_pairs(B, C, D)):
        scale = max(1.0, float(np.linalg.norm(x)) * float(np.linalg.norm(y)))
        scaled[name] = float(np.linalg.norm(x @ y - y @ x)) / scale
    return scaled


def pivot_rotation(v: np.ndarray, position: int) -> np.ndarray:
    """
    Unitary whose column `position` is v / ||v||

    Built from the Householder reflection taking |position> to v with its
    phase removed, so W^† maps v to |position> and basis kets give the
    identity.
    """
    v = np.asarray(v, dtype=complex).reshape(-1)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise InvalidCanonicalError("Pivot vector is zero")
    v = v / norm
    phase = v[position] / abs(v[position]) if abs(v[position]) > 0 else 1.0
    u = np.zeros_like(v)
    u[position] = 1.0
    u -= v / phase
    rotation = np.eye(v.size, dtype=complex)
    u_norm = float(np.linalg.norm(u))
    if u_norm > 1e-15:
        u /= u_norm
        rotation -= 2.0 * np.outer(u, u.conj())
    rotation[:, position] *= phase
    return rotation


def canonical_row(B: np.ndarray, C: np.ndarray, D: np.ndarray) -> np.ndarray:
    """The N x 6N block row (DC, DB, D, C, B, I)"""
    n = B.shape[0]
    return np.hstack([D @ C, D @ B, D, C, B, np.eye(n, dtype=complex)])


def sigma_form(B: np.ndarray, C: np.ndarray, D: np.ndarray) -> np.ndarray:
    """5N x 5N Gram matrix of the row (DB, D, C, B, I); its rank is N"""
    row = canonical_row(B, C, D)[:, B.shape[0]:]
    return row.conj().T @ row


def _check_canonical_data(cf: CanonicalForm, tol: float) -> None:
    n = cf.n
    for name, matrix in (("B", cf.B), ("C", cf.C), ("D", cf.D), ("F", cf.F)):
        if np.asarray(matrix).shape != (n, n):
            raise InvalidCanonicalError(f"{name} has shape {np.asarray(matrix).shape}, expected ({n}, {n})")
    scaled = _scaled_commutators(cf.B, cf.C, cf.D)
    offending = {name: value for name, value in scaled.items() if value > tol}
    if offending:
        raise InvalidCanonicalError(f"Canonical operators do not commute: {offending}")

    if not frobenius_close(cf.F, cf.F.conj().T, tol):
        deviation = float(np.linalg.norm(cf.F - cf.F.conj().T))
        raise InvalidCanonicalError(f"F is not Hermitian (deviation {deviation:.3e})")
    eigenvalues = np.linalg.eigvalsh((cf.F + cf.F.conj().T) / 2)
    if eigenvalues[0] <= settings.filter_eig_floor * max(eigenvalues[-1], 0.0) or eigenvalues[-1] <= 0:
        raise InvalidCanonicalError(
            f"F is not positive definite (eigenvalues in [{eigenvalues[0]:.3e}, {eigenvalues[-1]:.3e}])"
        )


def filtered_state(cf: CanonicalForm) -> DensityOperator:
    """X^† X for the canonical row X, i.e. the state in the filtered frame"""
    row = canonical_row(cf.B, cf.C, cf.D)
    return DensityOperator(TriDims(2, 3, cf.n), row.conj().T @ row, normalized=False)


def build_from_canonical(cf: CanonicalForm, normalize: bool = True) -> DensityOperator:
    """
    Assemble (W_A ⊗ W_B ⊗ sqrt(F)) X^† X (W_A ⊗ W_B ⊗ sqrt(F))^†

    Raises:
        InvalidCanonicalError: B, C, D do not commute as required or F is
        not positive definite
    """
    _check_canonical_data(cf, settings.canonical_tol)
    f_eigenvalues, f_vectors = hermitian_eig(cf.F)
    sqrt_f = (f_vectors * np.sqrt(f_eigenvalues)) @ f_vectors.conj().T

    rho = apply_local_filter(filtered_state(cf), cf.rotation_a, cf.rotation_b, sqrt_f)
    if normalize:
        rho = rho.normalize()
    return rho


def _default_pivot(dims) -> Pivot:
    e = np.zeros(dims.dA, dtype=complex)
    f = np.zeros(dims.dB, dtype=complex)
    e[-1] = 1.0
    f[-1] = 1.0
    return Pivot(e_a=e, f_b=f)


def _pivot_candidates(dims, max_trials: int, seed: int):
    """(|1>,|2>) first, then the other computational pairs, then seeded random pairs"""
    corner = (dims.dA - 1, dims.dB - 1)
    pairs = [corner] + [(i, j) for i in range(dims.dA) for j in range(dims.dB) if (i, j) != corner]
    for i, j in pairs:
        yield np.eye(dims.dA, dtype=complex)[i], np.eye(dims.dB, dtype=complex)[j]
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(max_trials):
        e = rng.standard_normal(dims.dA) + 1j * rng.standard_normal(dims.dA)
        f = rng.standard_normal(dims.dB) + 1j * rng.standard_normal(dims.dB)
        yield e / np.linalg.norm(e), f / np.linalg.norm(f)


def find_full_rank_pivot(
    rho: DensityOperator,
    max_trials: Optional[int] = None,
    seed: Optional[int] = None
) -> Pivot:
    """
    Search a product pair (e_A, f_B) whose conditional block has rank dC

    Args:
        rho: State whose rank equals Charlie's dimension
        max_trials: Number of random pairs after the computational sweep
        seed: Seed for the random pairs

    Returns:
        First Pivot found, with its singular-value gap and trial index
    """
    max_trials = settings.pivot_max_trials if max_trials is None else max_trials
    seed = settings.default_seed if seed is None else seed
    n = rho.dims.dC

    trial = 0
    for trial, (e, f) in enumerate(_pivot_candidates(rho.dims, max_trials, seed)):
        block = conditional_operator(rho, {Party.A: e, Party.B: f})
        decision = rank_kernel(block)
        logger.debug(f"Pivot trial {trial}: conditional rank {decision.rank}/{n}, gap {decision.gap:.3e}")
        if decision.rank == n:
            return Pivot(e_a=e, f_b=f, gap=decision.gap, trial=trial)

    raise PivotNotFoundError(
        f"No product pivot with a rank-{n} conditional block in {trial + 1} trials",
        trials=trial + 1
    )


def _block_residuals(grid: BlockGrid, row: np.ndarray, n: int) -> np.ndarray:
    pieces = [row[:, k * n:(k + 1) * n] for k in range(6)]
    residuals = np.zeros((6, 6))
    for p in range(6):
        for q in range(6):
            expected = pieces[p].conj().T @ pieces[q]
            residuals[p, q] = float(np.linalg.norm(grid.block(p, q) - expected))
    return residuals


def extract_canonical(
    rho: DensityOperator,
    pivot: Optional[Pivot] = None,
    tol: Optional[float] = None,
    ppt_report: Optional[PptReport] = None
) -> Tuple[CanonicalForm, CanonicalResiduals]:
    """
    Bring a rank-N PPT state to canonical form

    The pivot pair is rotated to |1_A, 2_B>, Charlie is filtered by
    F^{-1/2} with F the pivot block, and D, C, B are read from the last
    block row. All 36 blocks and the nine commutators are then validated.

    Args:
        rho: State on (2, 3, N)
        pivot: Full-rank pivot; (|1>, |2>) when omitted
        tol: Relative tolerance (settings.canonical_tol)
        ppt_report: Previously computed PPT report, to skip recomputation

    Returns:
        (CanonicalForm, CanonicalResiduals)

    Raises:
        NotPptError, PivotRankError, NotCanonicalizableError
    """
    tol = settings.canonical_tol if tol is None else tol
    dims = rho.dims
    if (dims.dA, dims.dB) != (2, 3):
        raise DimsError(f"Canonical form needs dims (2, 3, N), got {dims}")
    n = dims.dC

    report = ppt_check(rho) if ppt_report is None else ppt_report
    if not report.is_ppt:
        raise NotPptError("State is not PPT; canonical form does not apply", report=report)

    pivot = _default_pivot(dims) if pivot is None else pivot
    rotation_a = pivot_rotation(pivot.e_a, dims.dA - 1)
    rotation_b = pivot_rotation(pivot.f_b, dims.dB - 1)
    rotated = apply_local_filter(rho, rotation_a.conj().T, rotation_b.conj().T, np.eye(n))

    F = block_grid(rotated).block(PIVOT_BLOCK, PIVOT_BLOCK)
    F = (F + F.conj().T) / 2
    eigenvalues, vectors = hermitian_eig(F)
    top = float(eigenvalues[-1])
    if top <= 0 or eigenvalues[0] <= settings.filter_eig_floor * top:
        raise PivotRankError(
            f"Pivot block is not of full rank {n} (eigenvalues in [{eigenvalues[0]:.3e}, {top:.3e}])"
        )
    charlie_filter = (vectors * eigenvalues ** -0.5) @ vectors.conj().T

    filtered = apply_local_filter(rotated, np.eye(2), np.eye(3), charlie_filter)
    grid = block_grid(filtered)
    D = grid.block(PIVOT_BLOCK, 2).copy()
    C = grid.block(PIVOT_BLOCK, 3).copy()
    B = grid.block(PIVOT_BLOCK, 4).copy()

    block_residuals = _block_residuals(grid, canonical_row(B, C, D), n)
    norms = commutator_norms(B, C, D)
    residuals = CanonicalResiduals(
        block_residuals=block_residuals,
        delta_residual=float(block_residuals[1, 1]),
        delta_tilde_residual=float(block_residuals[0, 0]),
        commutator_norms=norms
    )

    scale = max(1.0, filtered.frobenius_norm)
    offending: List = [(p, q) for p in range(6) for q in range(6) if block_residuals[p, q] > tol * scale]
    scaled = _scaled_commutators(B, C, D)
    offending += [name for name, value in scaled.items() if value > tol]
    if offending:
        worst = max(residuals.max_block_residual / scale, max(scaled.values()))
        raise NotCanonicalizableError(
            f"Filtered state deviates from the canonical form at {offending[:6]} (worst {worst:.3e})",
            offending=offending,
            worst=worst
        )

    logger.debug(
        f"Canonical form extracted for N={n}: max block residual {residuals.max_block_residual:.3e}"
    )
    form = CanonicalForm(
        B=B, C=C, D=D, F=F,
        pivot=pivot,
        rotation_a=rotation_a,
        rotation_b=rotation_b,
        charlie_filter=charlie_filter
    )
    return form, residuals


def _to_original_frame(cf: CanonicalForm, vectors: np.ndarray, conjugate_b: bool) -> np.ndarray:
    rotation_b = cf.rotation_b.conj() if conjugate_b else cf.rotation_b
    return kron3(cf.rotation_a, rotation_b, cf.charlie_filter) @ vectors


def structural_kernel_vectors(cf: CanonicalForm, filtered: bool = False) -> np.ndarray:
    """
    The 5N kernel vectors |xy>|v> - |12> M_xy |v> as columns

    M_xy runs over DC, DB, D, C, B for the blocks |00>, |01>, |02>, |10>,
    |11>. With filtered=False they are mapped into the frame of the
    original state.
    """
    n = cf.n
    row = canonical_row(cf.B, cf.C, cf.D)
    columns = np.zeros((6 * n, 5 * n), dtype=complex)
    for p in range(5):
        block = row[:, p * n:(p + 1) * n]
        columns[p * n:(p + 1) * n, p * n:(p + 1) * n] = np.eye(n)
        columns[PIVOT_BLOCK * n:, p * n:(p + 1) * n] = -block
    return columns if filtered else _to_original_frame(cf, columns, conjugate_b=False)


def partial_transpose_kernel_vectors(cf: CanonicalForm, filtered: bool = False) -> np.ndarray:
    """
    The N vectors |02>|h> - |12> D|h> annihilated by the partial transpose over Bob

    With filtered=False they are mapped into the frame of the original
    state's partial transpose.
    """
    n = cf.n
    columns = np.zeros((6 * n, n), dtype=complex)
    columns[2 * n:3 * n] = np.eye(n)
    columns[PIVOT_BLOCK * n:] = -cf.D
    return columns if filtered else _to_original_frame(cf, columns, conjugate_b=True)

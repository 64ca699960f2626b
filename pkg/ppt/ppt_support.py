"""
PPT and Local Support
Partial-transpose verdicts across every bipartition and the local support
profile of a tripartite state
"""
from typing import Callable, Dict, Optional, Tuple
import logging

import numpy as np

from config import settings
from exceptions import InternalConsistencyError
from models import (
    DensityOperator, Party, PptReport, PptVerdict, SupportProfile, TriDims,
    PARTY_ORDER, party_label
)
from numlin.spectral import hermitian_eig, rank_kernel
from tensor.tensor_core import kron3, partial_transpose, reduced_operator

logger = logging.getLogger(__name__)

# Every nonempty proper subset; the last three are complements of the first three
PARTITIONS: Tuple[Party, ...] = (Party.A, Party.B, Party.C, Party.AB, Party.AC, Party.BC)
PARTITION_LABELS: Tuple[str, ...] = tuple(party_label(p) for p in PARTITIONS)


def _complement(subset: Party) -> Party:
    return Party.ABC & ~subset


def min_pt_eigenvalue(rho: DensityOperator, subset: Party) -> float:
    """Smallest eigenvalue of the partial transpose over `subset`"""
    eigenvalues, _ = hermitian_eig(partial_transpose(rho, subset).entries)
    return float(eigenvalues[0])


def ppt_check(rho: DensityOperator, tol: Optional[float] = None) -> PptReport:
    """
    PPT verdict from all six partial transposes

    Complementary partitions have identical spectra; a mismatch means the
    tensor bookkeeping is broken and is raised rather than reported.

    Args:
        rho: Hermitian operator
        tol: Tolerance on the minimum eigenvalues relative to max(1, |tr rho|)
            (settings.ppt_tol)

    Returns:
        PptReport; verdict NPT when any spectrum, or the plain one, dips
        below -tol * max(1, |tr rho|)
    """
    tol = settings.ppt_tol if tol is None else tol
    plain_eigenvalues, _ = hermitian_eig(rho.entries)
    plain_min = float(plain_eigenvalues[0])

    minima: Dict[str, float] = {}
    for subset in PARTITIONS:
        minima[party_label(subset)] = min_pt_eigenvalue(rho, subset)

    bound = settings.pt_consistency_tol * max(1.0, rho.frobenius_norm)
    for subset in PARTITIONS[:3]:
        own, other = minima[party_label(subset)], minima[party_label(_complement(subset))]
        if abs(own - other) > bound:
            raise InternalConsistencyError(
                f"Partial transposes over {party_label(subset)} and its complement disagree: "
                f"{own:.3e} vs {other:.3e}"
            )

    floor = -tol * max(1.0, abs(rho.trace))
    negative = plain_min < floor or any(value < floor for value in minima.values())
    verdict = PptVerdict.NPT if negative else PptVerdict.PPT
    logger.debug(f"PPT check on {rho.dims}: plain min {plain_min:.3e}, verdict {verdict.value}")
    return PptReport(
        min_eigenvalues=minima,
        plain_min_eigenvalue=plain_min,
        verdict=verdict,
        tol=tol
    )


def ppt_threshold(
    family: Callable[[float], DensityOperator],
    subset: Party = Party.A,
    lo: float = 0.0,
    hi: float = 1.0,
    tol: float = 1e-12,
    max_iter: int = 200
) -> float:
    """
    Locate where the partial transpose of a one-parameter family stops being PSD

    Assumes min eig of family(p)^{t_S} is nonnegative at `lo`, negative at
    `hi` and crosses zero once in between.

    Returns:
        The crossing parameter to within `tol`
    """
    f_lo = min_pt_eigenvalue(family(lo), subset)
    f_hi = min_pt_eigenvalue(family(hi), subset)
    if f_lo < 0 or f_hi >= 0:
        raise ValueError(
            f"Bisection needs a sign change on [{lo}, {hi}]: min eigenvalues {f_lo:.3e}, {f_hi:.3e}"
        )
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if min_pt_eigenvalue(family(mid), subset) >= 0:
            lo = mid
        else:
            hi = mid
    threshold = 0.5 * (lo + hi)
    logger.debug(f"PPT threshold over {party_label(subset)}: {threshold:.15f}")
    return threshold


def local_support(rho: DensityOperator, tol: Optional[float] = None) -> SupportProfile:
    """
    Local support dimensions M_A, M_B, M_C and isometries onto each support

    Args:
        rho: PSD operator
        tol: Relative rank tolerance (settings.rank_rel_tol by default)

    Returns:
        SupportProfile; a party with full support gets the identity isometry
    """
    dims, isometries = [], []
    for party in PARTY_ORDER:
        marginal = reduced_operator(rho, party)
        decision = rank_kernel(marginal, rel_tol=tol)
        local_dim = rho.dims.dim_of(party)
        if decision.rank == local_dim:
            isometries.append(np.eye(local_dim, dtype=complex))
        else:
            isometries.append(decision.range_basis)
        dims.append(decision.rank)
    profile = SupportProfile(tuple(dims), tuple(isometries))
    logger.debug(f"Local support of {rho.dims}: {profile.local_dims}")
    return profile


def compress_to_support(rho: DensityOperator, profile: SupportProfile) -> DensityOperator:
    """Restrict rho to C^{M_A} ⊗ C^{M_B} ⊗ C^{M_C} through the support isometries"""
    v = kron3(*profile.isometries)
    dims = TriDims(*profile.local_dims)
    return DensityOperator(dims, v.conj().T @ rho.entries @ v, normalized=rho.normalized)


def embed_from_support(rho: DensityOperator, profile: SupportProfile, dims: TriDims) -> DensityOperator:
    """Inverse of compress_to_support for operators supported on the local supports"""
    if rho.dims.shape != profile.local_dims:
        raise ValueError(f"Operator dims {rho.dims} do not match support {profile.local_dims}")
    v = kron3(*profile.isometries)
    return DensityOperator(dims, v @ rho.entries @ v.conj().T, normalized=rho.normalized)

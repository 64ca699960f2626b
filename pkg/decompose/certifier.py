"""
Certification Pipeline
End-to-end separability certification for PPT states of rank N on
C^2 ⊗ C^3 ⊗ C^N
"""
from typing import Optional
import logging

import numpy as np

from config import settings
from exceptions import DecompositionFailedError, DimsError, NotPptError, RankMismatchError
from models import (
    DensityOperator, ProductDecomposition, ProductTerm, SeparabilityCertificate,
    SupportProfile
)
from canonical.canonical_form import find_full_rank_pivot
from decompose.decomposer import decompose_rank_n, verify_decomposition
from numlin.spectral import rank_kernel
from ppt.ppt_support import compress_to_support, local_support, ppt_check

logger = logging.getLogger(__name__)


class CertificationPipeline:
    """Run the PPT, support, rank, pivot and decomposition steps in order"""

    def __init__(
        self,
        seed: Optional[int] = None,
        ppt_tol: Optional[float] = None,
        decomposition_tol: Optional[float] = None,
        max_trials: Optional[int] = None
    ):
        self.seed = settings.default_seed if seed is None else seed
        self.ppt_tol = settings.ppt_tol if ppt_tol is None else ppt_tol
        self.decomposition_tol = (
            settings.decomposition_tol if decomposition_tol is None else decomposition_tol
        )
        self.max_trials = settings.pivot_max_trials if max_trials is None else max_trials

    def charlie_profile(self, rho: DensityOperator, profile: SupportProfile) -> SupportProfile:
        """Support profile that compresses Charlie only"""
        dims = rho.dims
        return SupportProfile(
            local_dims=(dims.dA, dims.dB, profile.local_dims[2]),
            isometries=(
                np.eye(dims.dA, dtype=complex),
                np.eye(dims.dB, dtype=complex),
                profile.isometries[2]
            )
        )

    def certify(self, rho: DensityOperator) -> SeparabilityCertificate:
        """
        Certify separability of a rank-N PPT state

        Args:
            rho: State on (2, 3, N)

        Returns:
            Verified SeparabilityCertificate in the frame of `rho`

        Raises:
            NotPptError: some partial transpose is negative
            RankMismatchError: rank differs from Charlie's support dimension
            PivotNotFoundError: no full-rank conditional block was found
            DecompositionFailedError: the terms do not reproduce rho
        """
        dims = rho.dims
        if (dims.dA, dims.dB) != (2, 3):
            raise DimsError(f"Certification needs dims (2, 3, N), got {dims}")

        report = ppt_check(rho, tol=self.ppt_tol)
        if not report.is_ppt:
            raise NotPptError(
                f"State is NPT (minimum partial-transpose eigenvalue "
                f"{min(report.min_eigenvalues.values()):.3e}); no certificate is issued",
                report=report
            )

        profile = local_support(rho)
        m_c = profile.local_dims[2]
        compressed = m_c < dims.dC
        working = rho
        charlie = self.charlie_profile(rho, profile)
        if compressed:
            logger.info(f"Compressing Charlie from {dims.dC} to its support dimension {m_c}")
            working = compress_to_support(rho, charlie)

        rank = rank_kernel(rho.entries).rank
        if rank != m_c:
            raise RankMismatchError(
                f"Rank {rank} differs from Charlie's support dimension {m_c}",
                rank=rank,
                expected=m_c
            )

        pivot = find_full_rank_pivot(working, max_trials=self.max_trials, seed=self.seed)
        local = decompose_rank_n(
            working,
            pivot=pivot,
            seed=self.seed,
            tol=self.decomposition_tol,
            ppt_report=report
        )

        terms = local.decomposition.terms
        if compressed:
            isometry = charlie.isometries[2]
            terms = [ProductTerm(t.weight, t.a, t.b, isometry @ t.c) for t in terms]
        dec = ProductDecomposition(dims, terms)

        verification = verify_decomposition(rho, dec, tol=self.decomposition_tol)
        if not verification.passed:
            raise DecompositionFailedError(
                f"Re-embedded terms do not reproduce the state (residual {verification.residual:.3e})",
                residual=verification.residual
            )

        tolerances = settings.tolerances()
        tolerances.update(ppt_tol=self.ppt_tol, decomposition_tol=self.decomposition_tol)
        certificate = SeparabilityCertificate(
            decomposition=dec,
            ppt_report=report,
            reconstruction_residual=verification.residual,
            relative_residual=verification.relative_residual,
            commutator_norms=local.commutator_norms,
            pivot=pivot,
            seed=self.seed,
            tolerances=tolerances,
            support_dims=profile.local_dims,
            compressed=compressed,
            pruned_terms=local.pruned_terms,
            canonical_form=local.canonical_form,
            tool_version=settings.app_version
        )
        logger.info(
            f"Certificate issued for {dims}: {len(terms)} terms, residual {verification.residual:.3e}"
        )
        return certificate


def certify_rank_n_separability(
    rho: DensityOperator,
    seed: Optional[int] = None,
    ppt_tol: Optional[float] = None,
    decomposition_tol: Optional[float] = None
) -> SeparabilityCertificate:
    """Certify a rank-N PPT state with a default pipeline"""
    pipeline = CertificationPipeline(seed=seed, ppt_tol=ppt_tol, decomposition_tol=decomposition_tol)
    return pipeline.certify(rho)

"""
Product Decomposition
Explicit product-state decomposition of rank-N canonical states and
independent verification of decompositions against a state
"""
from typing import List, Optional, Tuple
import logging

import numpy as np

from config import settings
from exceptions import DecompositionFailedError, DimsError, InvalidDecompositionError
from models import (
    CanonicalForm, DensityOperator, Pivot, PptReport, ProductDecomposition,
    ProductTerm, SeparabilityCertificate, VerificationReport, PARTY_ORDER, party_label
)
from canonical.canonical_form import commutator_norms, extract_canonical
from numlin.joint_diag import joint_diagonalize
from numlin.spectral import psd_sqrt
from ppt.ppt_support import ppt_check
from tensor.tensor_core import kron3, reduced_operator

logger = logging.getLogger(__name__)


def prune_terms(
    terms: List[ProductTerm],
    tol: Optional[float] = None
) -> Tuple[List[ProductTerm], int]:
    """
    Drop terms whose weight is negligible against the total

    Args:
        terms: Product terms
        tol: Relative weight threshold (settings.prune_weight_tol)

    Returns:
        Kept terms and the number dropped
    """
    tol = settings.prune_weight_tol if tol is None else tol
    total = sum(term.weight for term in terms)
    kept = [term for term in terms if term.weight > tol * total]
    pruned = len(terms) - len(kept)
    if pruned:
        logger.warning(f"Pruned {pruned} terms with weight below {tol:.1e} of the total {total:.3e}")
    return kept, pruned


def decompose_canonical(
    cf: CanonicalForm,
    seed: Optional[int] = None,
    prune: bool = True
) -> List[ProductTerm]:
    """
    Product terms of the state described by a canonical form

    With f_n the common eigenvectors of B, C, D and (b_n, c_n, d_n) their
    eigenvalues, term n is

        a = W_A conj(d_n, 1),  b = W_B conj(c_n, b_n, 1),  c = sqrt(F) f_n

    with the weight collecting the squared norms of the three factors.

    Args:
        cf: Canonical form
        seed: Seed for the joint diagonalization weights
        prune: Drop negligible terms through prune_terms

    Returns:
        One term per eigenvector, unit vectors, positive weights
    """
    spectrum = joint_diagonalize([cf.B, cf.C, cf.D], seed=seed)
    sqrt_f = psd_sqrt(cf.F)
    terms = []
    for n in range(cf.n):
        b_n, c_n, d_n = spectrum.eigenvalues[:, n]
        a = cf.rotation_a @ np.conj(np.array([d_n, 1.0]))
        b = cf.rotation_b @ np.conj(np.array([c_n, b_n, 1.0]))
        c = sqrt_f @ spectrum.basis[:, n]
        norms = [float(np.linalg.norm(x)) for x in (a, b, c)]
        weight = float(np.prod(np.square(norms)))
        terms.append(ProductTerm(weight=weight, a=a / norms[0], b=b / norms[1], c=c / norms[2]))

    return prune_terms(terms)[0] if prune else terms


def reconstruct(dec: ProductDecomposition) -> DensityOperator:
    """Sum of w_n |a_n, b_n, c_n><a_n, b_n, c_n|"""
    n = dec.dims.total
    entries = np.zeros((n, n), dtype=complex)
    for term in dec.terms:
        v = kron3(term.a, term.b, term.c)
        entries += term.weight * np.outer(v, v.conj())
    return DensityOperator(dec.dims, entries, normalized=False)


def verify_decomposition(
    rho: DensityOperator,
    dec: ProductDecomposition,
    tol: Optional[float] = None
) -> VerificationReport:
    """
    Compare a decomposition against a state from scratch

    Args:
        rho: Target state
        dec: Decomposition to check
        tol: Pass threshold on the Frobenius residual relative to
            max(1, ||rho||_F) (settings.decomposition_tol by default)

    Returns:
        VerificationReport with the full and per-party marginal residuals
    """
    tol = settings.decomposition_tol if tol is None else tol
    if dec.dims != rho.dims:
        raise DimsError(f"Decomposition dims {dec.dims} do not match state dims {rho.dims}")
    for index, term in enumerate(dec.terms):
        if term.weight < 0:
            raise InvalidDecompositionError(f"Term {index} has negative weight {term.weight}")
        if (term.a.size, term.b.size, term.c.size) != rho.dims.shape:
            raise InvalidDecompositionError(
                f"Term {index} has vector lengths {(term.a.size, term.b.size, term.c.size)}, "
                f"expected {rho.dims.shape}"
            )

    approximation = reconstruct(dec)
    residual = float(np.linalg.norm(rho.entries - approximation.entries))
    relative = residual / max(1.0, rho.frobenius_norm)
    marginals = {
        party_label(party): float(np.linalg.norm(
            reduced_operator(rho, party) - reduced_operator(approximation, party)
        ))
        for party in PARTY_ORDER
    }
    passed = relative <= tol
    logger.debug(f"Decomposition of {len(dec.terms)} terms: residual {residual:.3e}, passed={passed}")
    return VerificationReport(
        residual=residual,
        relative_residual=relative,
        marginal_residuals=marginals,
        passed=passed,
        tol=tol
    )


def decompose_rank_n(
    rho: DensityOperator,
    pivot: Optional[Pivot] = None,
    seed: Optional[int] = None,
    tol: Optional[float] = None,
    ppt_report: Optional[PptReport] = None
) -> SeparabilityCertificate:
    """
    Certificate for a state that admits a canonical form

    Args:
        rho: Rank-N PPT state on (2, 3, N)
        pivot: Full-rank pivot for the extraction; (|1>, |2>) by default
        seed: Seed for the joint diagonalization
        tol: Decomposition tolerance (settings.decomposition_tol)
        ppt_report: Previously computed PPT report

    Returns:
        SeparabilityCertificate carrying N product terms

    Raises:
        DecompositionFailedError: the terms do not reproduce rho
    """
    seed = settings.default_seed if seed is None else seed
    report = ppt_check(rho) if ppt_report is None else ppt_report
    cf, _ = extract_canonical(rho, pivot=pivot, ppt_report=report)

    terms, pruned = prune_terms(decompose_canonical(cf, seed=seed, prune=False))
    dec = ProductDecomposition(rho.dims, terms)
    verification = verify_decomposition(rho, dec, tol=tol)
    if not verification.passed:
        raise DecompositionFailedError(
            f"Product terms do not reproduce the state (residual {verification.residual:.3e})",
            residual=verification.residual
        )

    tolerances = settings.tolerances()
    tolerances.update(decomposition_tol=verification.tol)
    return SeparabilityCertificate(
        decomposition=dec,
        ppt_report=report,
        reconstruction_residual=verification.residual,
        relative_residual=verification.relative_residual,
        commutator_norms=commutator_norms(cf.B, cf.C, cf.D),
        pivot=cf.pivot,
        seed=seed,
        tolerances=tolerances,
        support_dims=rho.dims.shape,
        pruned_terms=pruned,
        canonical_form=cf,
        tool_version=settings.app_version
    )

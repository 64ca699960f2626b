"""
State Generators
Seeded canonical, separable, product-projector and NPT test states

Randomness comes from numpy's PCG64 bit generator wrapped in
numpy.random.Generator; a seed fixes every draw, so identical GenSpecs give
bit-identical states for a given numpy release.
"""
from typing import Optional, Tuple, Union
import logging

import numpy as np

from exceptions import DimsError
from models import (
    CanonicalForm, DensityOperator, GenSpec, Party, Pivot, ProductDecomposition,
    ProductTerm, StateKind, TriDims
)
from canonical.canonical_form import build_from_canonical
from numlin.spectral import psd_sqrt
from ppt.ppt_support import ppt_threshold
from tensor.tensor_core import apply_local_filter, kron3

logger = logging.getLogger(__name__)

GroundTruth = Union[CanonicalForm, ProductDecomposition, None]


def make_rng(seed: int) -> np.random.Generator:
    """Generator on the PCG64 stream for `seed`"""
    return np.random.Generator(np.random.PCG64(seed))


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly distributed unit vector in C^dim"""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a complex Gaussian matrix"""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_disk(rng: np.random.Generator, size: int, radius: float) -> np.ndarray:
    """Uniform samples from the complex disk |z| <= radius"""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, size))
    theta = rng.uniform(0.0, 2 * np.pi, size)
    return r * np.exp(1j * theta)


def random_positive_definite(n: int, rng: np.random.Generator, condition_cap: float) -> np.ndarray:
    """Hermitian positive definite matrix with condition number at most condition_cap"""
    u = haar_unitary(n, rng)
    eigenvalues = rng.uniform(1.0, condition_cap, n)
    return (u * eigenvalues) @ u.conj().T


def random_canonical_state(
    n: int,
    seed: int = 0,
    radius_b: float = 1.0,
    radius_c: float = 1.0,
    radius_d: float = 1.0,
    f_condition_cap: float = 10.0
) -> Tuple[DensityOperator, CanonicalForm]:
    """
    Trace-1 state with an exactly commuting canonical form

    B, C, D share one Haar eigenbasis with eigenvalues from disks of the
    given radii; F has condition number at most f_condition_cap.

    Returns:
        (state, ground-truth form); building the form without
        normalization reproduces the state
    """
    if n < 1:
        raise DimsError(f"N must be at least 1, got {n}")
    rng = make_rng(seed)
    u = haar_unitary(n, rng)
    B = (u * random_disk(rng, n, radius_b)) @ u.conj().T
    C = (u * random_disk(rng, n, radius_c)) @ u.conj().T
    D = (u * random_disk(rng, n, radius_d)) @ u.conj().T
    F = random_positive_definite(n, rng, f_condition_cap)

    pivot = Pivot(e_a=np.array([0, 1], dtype=complex), f_b=np.array([0, 0, 1], dtype=complex))
    draft = CanonicalForm(
        B=B, C=C, D=D, F=F, pivot=pivot,
        rotation_a=np.eye(2, dtype=complex),
        rotation_b=np.eye(3, dtype=complex),
        charlie_filter=psd_sqrt(F, inverse=True)
    )
    unnormalized = build_from_canonical(draft, normalize=False)
    F = F / unnormalized.trace.real
    truth = CanonicalForm(
        B=B, C=C, D=D, F=F, pivot=pivot,
        rotation_a=draft.rotation_a,
        rotation_b=draft.rotation_b,
        charlie_filter=psd_sqrt(F, inverse=True)
    )
    rho = build_from_canonical(truth, normalize=True)
    logger.info(f"Generated canonical state N={n} seed={seed}")
    return rho, truth


def _product_state(dims: TriDims, terms) -> DensityOperator:
    entries = np.zeros((dims.total, dims.total), dtype=complex)
    for term in terms:
        v = kron3(term.a, term.b, term.c)
        entries += term.weight * np.outer(v, v.conj())
    return DensityOperator(dims, entries / np.trace(entries).real)


def random_separable_state(
    dims: TriDims,
    k: int,
    seed: int = 0
) -> Tuple[DensityOperator, ProductDecomposition]:
    """k random product projectors with Dirichlet weights, and the witness decomposition"""
    if k < 1:
        raise DimsError(f"Number of terms must be at least 1, got {k}")
    rng = make_rng(seed)
    weights = rng.dirichlet(np.ones(k))
    terms = [
        ProductTerm(
            weight=float(w),
            a=random_unit_vector(dims.dA, rng),
            b=random_unit_vector(dims.dB, rng),
            c=random_unit_vector(dims.dC, rng)
        )
        for w in weights
    ]
    logger.info(f"Generated separable state {dims} with {k} terms, seed={seed}")
    return _product_state(dims, terms), ProductDecomposition(dims, terms)


def random_product_projector_sum(
    dims: TriDims,
    k: int,
    seed: int = 0
) -> Tuple[DensityOperator, ProductDecomposition]:
    """Equal-weight mixture of k random product projectors"""
    if k < 1:
        raise DimsError(f"Number of terms must be at least 1, got {k}")
    rng = make_rng(seed)
    terms = [
        ProductTerm(
            weight=1.0 / k,
            a=random_unit_vector(dims.dA, rng),
            b=random_unit_vector(dims.dB, rng),
            c=random_unit_vector(dims.dC, rng)
        )
        for _ in range(k)
    ]
    return _product_state(dims, terms), ProductDecomposition(dims, terms)


def entangled_vector(dims: TriDims) -> np.ndarray:
    """(|0,0,0> + |1,1 mod dB,1 mod dC>) / sqrt(2)"""
    phi = np.zeros(dims.total, dtype=complex)
    for k in range(2):
        a = np.eye(dims.dA)[k % dims.dA]
        b = np.eye(dims.dB)[k % dims.dB]
        c = np.eye(dims.dC)[k % dims.dC]
        phi += kron3(a, b, c)
    return phi / np.linalg.norm(phi)


def npt_mixture(dims: TriDims, p: float) -> DensityOperator:
    """p |Φ><Φ| + (1 - p) I / dim"""
    phi = entangled_vector(dims)
    entries = p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(dims.total) / dims.total
    return DensityOperator(dims, entries)


def npt_threshold(dims: TriDims) -> float:
    """Mixing parameter above which the Alice partial transpose turns negative"""
    return ppt_threshold(lambda p: npt_mixture(dims, p), subset=Party.A)


def random_npt_state(dims: TriDims, seed: int = 0, p: Optional[float] = None) -> DensityOperator:
    """
    NPT mixture rotated by seeded local unitaries

    Without an explicit p, the mixing sits strictly between the bisected
    threshold and 1.
    """
    if dims.dA < 2 or dims.dB * dims.dC < 2:
        raise DimsError(f"Dims {dims} admit no entanglement across A:BC")
    rng = make_rng(seed)
    if p is None:
        threshold = npt_threshold(dims)
        p = threshold + rng.uniform(0.2, 0.9) * (1 - threshold)
    rho = npt_mixture(dims, p)
    rotated = apply_local_filter(
        rho,
        haar_unitary(dims.dA, rng),
        haar_unitary(dims.dB, rng),
        haar_unitary(dims.dC, rng)
    )
    logger.info(f"Generated NPT mixture {dims} p={p:.6f} seed={seed}")
    return DensityOperator(dims, rotated.entries)


def generate(spec: GenSpec) -> Tuple[DensityOperator, GroundTruth]:
    """
    Dispatch a GenSpec to its generator

    Returns:
        (state, ground truth); the truth is a CanonicalForm, a
        ProductDecomposition, or None for NPT mixtures
    """
    dims = spec.dims
    if spec.kind == StateKind.CANONICAL:
        if (dims.dA, dims.dB) != (2, 3):
            raise DimsError(f"Canonical states need dims (2, 3, N), got {dims}")
        return random_canonical_state(
            dims.dC,
            seed=spec.seed,
            radius_b=spec.radius_b,
            radius_c=spec.radius_c,
            radius_d=spec.radius_d,
            f_condition_cap=spec.f_condition_cap
        )
    if spec.kind == StateKind.SEPARABLE:
        return random_separable_state(dims, spec.rank or dims.dC, seed=spec.seed)
    if spec.kind == StateKind.PRODUCT_PROJECTOR_SUM:
        return random_product_projector_sum(dims, spec.rank or dims.dC, seed=spec.seed)
    return random_npt_state(dims, seed=spec.seed, p=spec.mixing), None

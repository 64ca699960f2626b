"""
Product Kernel Search
Product vectors |e, f, g> in the kernel of a tripartite state via matrix
pencils, projector subtraction, and the range vectors derived from a
product kernel vector
"""
from dataclasses import dataclass
from itertools import permutations
from typing import Dict, Iterator, List, Optional, Tuple, Union
import logging

import numpy as np
import scipy.linalg

from config import settings
from exceptions import (
    DimsError, KernelEmptyError, NoProductKernelVectorError, StructureViolationError
)
from models import (
    DensityOperator, DerivedRangeVectors, Party, PencilStatus, ProductKernelVector,
    StateVector, PARTY_ORDER, party_axes, party_label
)
from numlin.pencil import pencil_roots
from numlin.spectral import null_vector, range_inverse_quadratic, rank_kernel
from tensor.tensor_core import kron3, reduced_operator

logger = logging.getLogger(__name__)

FIXED_UNIFORM = "uniform"
FIXED_RANDOM = "random"
REDUCE = "reduce"


@dataclass(frozen=True)
class KernelStrategy:
    """
    How the three parties are treated in one search

    `param` runs over the plane |0> + alpha |1>, `solve` is the party whose
    vector spans a null space, and `third` is either fixed (uniform, random
    or caller-supplied vector) or chosen by a rank-drop reduction.
    """
    name: str
    param: Party
    solve: Party
    third: Party
    third_mode: str = FIXED_UNIFORM


STRATEGY_TABLE: Dict[Tuple[int, Tuple[int, int, int]], KernelStrategy] = {
    (2, (2, 2, 3)): KernelStrategy("underdetermined", Party.B, Party.C, Party.A, FIXED_RANDOM),
    (4, (2, 2, 3)): KernelStrategy("cubic-reduce-alice", Party.B, Party.C, Party.A, REDUCE),
    (4, (2, 3, 3)): KernelStrategy("cubic-reduce-charlie", Party.A, Party.B, Party.C, REDUCE),
    (5, (2, 3, 5)): KernelStrategy("quintic", Party.A, Party.C, Party.B, FIXED_UNIFORM),
}


def generic_strategies(dims: Tuple[int, int, int]) -> List[KernelStrategy]:
    """Every party assignment, fixed-uniform first, then reduction, then random"""
    strategies = []
    for mode in (FIXED_UNIFORM, REDUCE, FIXED_RANDOM):
        for third, param, solve in permutations(PARTY_ORDER):
            if dims[party_axes(param)[0]] < 2:
                continue
            if mode == REDUCE and dims[party_axes(third)[0]] < 2:
                continue
            name = f"generic-{mode}-{party_label(param)}{party_label(solve)}{party_label(third)}"
            strategies.append(KernelStrategy(name, param, solve, third, mode))
    return strategies


def _phase_fixed(v: np.ndarray) -> np.ndarray:
    """Unit vector with its largest entry real and positive"""
    v = np.asarray(v, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def _basis(dim: int, index: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)[index]


def _axis(party: Party) -> int:
    return party_axes(party)[0] + 1


def _contract(constraints: np.ndarray, party: Party, vector: np.ndarray) -> np.ndarray:
    """Contract one party axis of the (r, dA, dB, dC) constraint tensor"""
    return np.tensordot(constraints, vector, axes=([_axis(party)], [0]))


def _pair_tensor(constraints: np.ndarray, third: Party, vector: np.ndarray,
                 param: Party, solve: Party) -> np.ndarray:
    """(r, d_param, d_solve) constraints left after fixing the third party"""
    reduced = _contract(constraints, third, vector)
    if party_axes(param)[0] > party_axes(solve)[0]:
        reduced = reduced.transpose(0, 2, 1)
    return reduced


def _compress_rows(tensor: np.ndarray) -> np.ndarray:
    """Drop linearly dependent constraints: (r, p, q) -> (r_eff, p, q)"""
    r, p, q = tensor.shape
    flat = tensor.reshape(r, p * q)
    decision = rank_kernel(flat)
    return (decision.range_basis.conj().T @ flat).reshape(decision.rank, p, q)


def _solve_pair(
    tensor: np.ndarray,
    rng: np.random.Generator
) -> List[Tuple[np.ndarray, np.ndarray, Optional[complex]]]:
    """
    Candidate (param vector, solved vector, alpha) triples for the bilinear
    constraints tensor[i] (p, q) = 0 with p = |0> + alpha |1>
    """
    compressed = _compress_rows(tensor)
    r_eff, d_param, d_solve = compressed.shape
    p0, p1 = _basis(d_param, 0), _basis(d_param, 1)
    if r_eff == 0:
        return [(p0, _basis(d_solve, 0), 0.0)]

    m0 = np.einsum("ipq,p->iq", compressed, p0)
    m1 = np.einsum("ipq,p->iq", compressed, p1)
    if r_eff < d_solve:
        q, _ = null_vector(m0)
        return [(p0, q, 0.0)]

    s0, s1 = m0, m1
    if r_eff > d_solve:
        # overdetermined: roots of a random square sketch, verified on the full system
        sketch = rng.standard_normal((d_solve, r_eff)) + 1j * rng.standard_normal((d_solve, r_eff))
        s0, s1 = sketch @ m0, sketch @ m1

    pencil = pencil_roots(s0, s1)
    if pencil.status == PencilStatus.IDENTICALLY_SINGULAR:
        alphas = [0.0]
    else:
        alphas = list(pencil.roots)

    candidates = []
    for alpha in alphas:
        q, _ = null_vector(m0 + alpha * m1)
        candidates.append((p0 + alpha * p1, q, complex(alpha)))
    if pencil.n_infinite:
        q, _ = null_vector(m1)
        candidates.append((p1, q, None))
    return candidates


def _reduction_vectors(constraints: np.ndarray, third: Party) -> List[np.ndarray]:
    """
    Vectors x on the plane |0> + beta |1> of the third party for which the
    contracted constraints lose one dimension

    Needs the span of all contracted constraints to have dimension r, so the
    dependence condition is a square pencil.
    """
    r = constraints.shape[0]
    moved = np.moveaxis(constraints, _axis(third), 1)
    d_third = moved.shape[1]
    rows = moved.reshape(r * d_third, -1)
    span = rank_kernel(rows.T).range_basis
    if span.shape[1] != r:
        logger.debug(
            f"Reduction on {party_label(third)} skipped: constraint span {span.shape[1]} != rank {r}"
        )
        return []

    x0, x1 = _basis(d_third, 0), _basis(d_third, 1)
    g0 = span.conj().T @ np.tensordot(constraints, x0, axes=([_axis(third)], [0])).reshape(r, -1).T
    g1 = span.conj().T @ np.tensordot(constraints, x1, axes=([_axis(third)], [0])).reshape(r, -1).T
    pencil = pencil_roots(g0, g1)
    if pencil.status == PencilStatus.IDENTICALLY_SINGULAR:
        return [x0]
    vectors = [x0 + beta * x1 for beta in pencil.roots]
    if pencil.n_infinite:
        vectors.append(x1)
    return vectors


def _third_vectors(
    strategy: KernelStrategy,
    constraints: np.ndarray,
    dims: Tuple[int, int, int],
    free_vector: Optional[np.ndarray],
    rng: np.random.Generator
) -> List[np.ndarray]:
    d_third = dims[party_axes(strategy.third)[0]]
    if strategy.third_mode == REDUCE:
        return _reduction_vectors(constraints, strategy.third)
    if free_vector is not None:
        free_vector = np.asarray(free_vector, dtype=complex).reshape(-1)
        if free_vector.size != d_third:
            raise DimsError(
                f"Free vector for {party_label(strategy.third)} has length {free_vector.size}, "
                f"expected {d_third}"
            )
        return [free_vector]
    if strategy.third_mode == FIXED_RANDOM:
        x = rng.standard_normal(d_third) + 1j * rng.standard_normal(d_third)
        return [x / np.linalg.norm(x)]
    return [np.ones(d_third, dtype=complex) / np.sqrt(d_third)]


def _assemble(strategy: KernelStrategy, third: np.ndarray, param: np.ndarray,
              solve: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    by_party = {strategy.third: third, strategy.param: param, strategy.solve: solve}
    return tuple(_phase_fixed(by_party[party]) for party in PARTY_ORDER)


def _run_strategy(
    rho: DensityOperator,
    constraints: np.ndarray,
    strategy: KernelStrategy,
    free_vector: Optional[np.ndarray],
    rng: np.random.Generator
) -> Iterator[ProductKernelVector]:
    dims = rho.dims.shape
    for third in _third_vectors(strategy, constraints, dims, free_vector, rng):
        pair = _pair_tensor(constraints, strategy.third, third, strategy.param, strategy.solve)
        for param, solve, alpha in _solve_pair(pair, rng):
            if np.linalg.norm(param) == 0 or np.linalg.norm(solve) == 0:
                continue
            e, f, g = _assemble(strategy, third, param, solve)
            residual = float(np.linalg.norm(rho.entries @ kron3(e, f, g)))
            yield ProductKernelVector(e, f, g, residual, alpha=alpha, strategy=strategy.name)


def _orthogonal_sector(rho: DensityOperator) -> Optional[ProductKernelVector]:
    """A local kernel vector on any party gives a product kernel vector directly"""
    for party in PARTY_ORDER:
        decision = rank_kernel(reduced_operator(rho, party))
        if decision.kernel_dim == 0:
            continue
        local = _phase_fixed(decision.kernel_basis[:, 0])
        vectors = [local if p == party else _basis(rho.dims.dim_of(p), 0) for p in PARTY_ORDER]
        residual = float(np.linalg.norm(rho.entries @ kron3(*vectors)))
        logger.debug(f"Orthogonal sector on {party_label(party)} (residual {residual:.3e})")
        return ProductKernelVector(*vectors, residual=residual, strategy="orthogonal-sector")
    return None


def _root_order(candidate: ProductKernelVector) -> Tuple[float, float]:
    return (candidate.residual, float("inf") if candidate.alpha is None else abs(candidate.alpha))


def find_product_kernel_vector(
    rho: DensityOperator,
    strategy: Optional[KernelStrategy] = None,
    free_vector: Optional[np.ndarray] = None,
    seed: Optional[int] = None
) -> ProductKernelVector:
    """
    Product vector |e, f, g> with rho |e, f, g> = 0

    Without an explicit strategy the orthogonal-sector shortcut is tried
    first (skipped when a free vector is supplied), then the entry of
    STRATEGY_TABLE for (rank, dims), then every generic assignment. The
    first candidate within kernel_tol wins; otherwise the best candidate
    within root_accept_tol is returned. Candidates are ranked by residual,
    then by |alpha|.

    Args:
        rho: Tripartite operator with a nontrivial kernel
        strategy: Force a single strategy
        free_vector: Vector for the fixed third party
        seed: Seed for random third-party vectors and sketches

    Returns:
        ProductKernelVector with unit, phase-fixed components

    Raises:
        KernelEmptyError: rho has full rank
        NoProductKernelVectorError: no candidate within root_accept_tol
    """
    seed = settings.default_seed if seed is None else seed
    decision = rank_kernel(rho.entries)
    if decision.kernel_dim == 0:
        raise KernelEmptyError(f"Operator on {rho.dims} has full rank {decision.rank}")

    scale = max(1.0, rho.frobenius_norm)
    if strategy is None and free_vector is None:
        shortcut = _orthogonal_sector(rho)
        if shortcut is not None and shortcut.residual <= settings.kernel_tol * scale:
            return shortcut

    if strategy is not None:
        strategies = [strategy]
    else:
        strategies = generic_strategies(rho.dims.shape)
        preferred = STRATEGY_TABLE.get((decision.rank, rho.dims.shape))
        if preferred is not None:
            strategies.insert(0, preferred)

    # ψ_i are the range columns; constraints are <ψ_i|e, f, g> = 0
    constraints = decision.range_basis.T.conj().reshape((decision.rank,) + rho.dims.shape)
    rng = np.random.Generator(np.random.PCG64(seed))
    best: Optional[ProductKernelVector] = None
    for current in strategies:
        candidates = sorted(_run_strategy(rho, constraints, current, free_vector, rng), key=_root_order)
        if not candidates:
            continue
        logger.debug(
            f"Strategy {current.name}: {len(candidates)} candidates, best residual {candidates[0].residual:.3e}"
        )
        if best is None or _root_order(candidates[0]) < _root_order(best):
            best = candidates[0]
        if best.residual <= settings.kernel_tol * scale:
            return best

    if best is not None and best.residual <= settings.root_accept_tol * scale:
        logger.warning(
            f"Accepting product kernel vector with residual {best.residual:.3e} "
            f"above {settings.kernel_tol:.1e}"
        )
        return best
    raise NoProductKernelVectorError(
        f"No product kernel vector within {settings.root_accept_tol:.1e} on {rho.dims}",
        best_residual=None if best is None else best.residual
    )


def subtract_projector(
    rho: DensityOperator,
    v: Union[StateVector, np.ndarray]
) -> Tuple[DensityOperator, float]:
    """
    Remove the largest multiple of |v><v| that keeps rho positive

    The rank drops by one and rho^+ |v> joins the kernel.

    Returns:
        (rho - lambda |v><v|, lambda)
    """
    amplitudes = v.amplitudes if isinstance(v, StateVector) else np.asarray(v, dtype=complex).reshape(-1)
    if amplitudes.size != rho.dims.total:
        raise DimsError(f"Vector of length {amplitudes.size} does not match dims {rho.dims}")
    weight = range_inverse_quadratic(rho.entries, amplitudes)
    remainder = rho.entries - weight * np.outer(amplitudes, amplitudes.conj())
    logger.debug(f"Subtracted projector with weight {weight:.6e}")
    return rho.with_entries(remainder, normalized=False), weight


def _complement_qubit(v: np.ndarray) -> np.ndarray:
    return np.array([-np.conj(v[1]), np.conj(v[0])])


def derived_range_vectors(
    rho: DensityOperator,
    kernel_vector: ProductKernelVector,
    tol: Optional[float] = None
) -> DerivedRangeVectors:
    """
    Range vectors obtained by flipping one factor of a product kernel vector

    rho|ê, f, g> must equal |ê>|ψ_BC>; when dB = 2, rho|e, f̂, g> must equal
    |f̂>-sector vectors ψ_AC; for every direction ĝ orthogonal to g,
    rho|e, f, ĝ> has no component along g. The residuals measure those
    components.

    Raises:
        StructureViolationError: a residual exceeds tol * max(1, ||rho||_F)
    """
    tol = settings.root_accept_tol if tol is None else tol
    dims = rho.dims
    if dims.dA != 2:
        raise DimsError(f"Derived range vectors need dA = 2, got {dims}")
    e = np.asarray(kernel_vector.e, dtype=complex)
    f = np.asarray(kernel_vector.f, dtype=complex)
    g = np.asarray(kernel_vector.g, dtype=complex)
    scale = max(1.0, rho.frobenius_norm)

    flipped = (rho.entries @ kron3(_complement_qubit(e), f, g)).reshape(dims.shape)
    psi_bc = np.tensordot(_complement_qubit(e).conj(), flipped, axes=([0], [0])).reshape(-1)
    residuals = {"A": float(np.linalg.norm(np.tensordot(e.conj(), flipped, axes=([0], [0]))))}

    psi_ac = None
    if dims.dB == 2:
        f_hat = _complement_qubit(f)
        flipped_b = (rho.entries @ kron3(e, f_hat, g)).reshape(dims.shape)
        psi_ac = np.tensordot(f_hat.conj(), flipped_b, axes=([0], [1])).reshape(-1)
        residuals["B"] = float(np.linalg.norm(np.tensordot(f.conj(), flipped_b, axes=([0], [1]))))

    complements = scipy.linalg.null_space(g.conj()[np.newaxis, :])
    psi_ab, worst_c = [], 0.0
    for i in range(complements.shape[1]):
        g_hat = complements[:, i]
        flipped_c = (rho.entries @ kron3(e, f, g_hat)).reshape(dims.shape)
        psi_ab.append(np.tensordot(flipped_c, g_hat.conj(), axes=([2], [0])).reshape(-1))
        worst_c = max(worst_c, float(np.linalg.norm(np.tensordot(flipped_c, g.conj(), axes=([2], [0])))))
    residuals["C"] = worst_c

    worst = max(residuals.values())
    if worst > tol * scale:
        raise StructureViolationError(
            f"Range vectors do not factor as expected (residuals {residuals})",
            residual=worst
        )
    return DerivedRangeVectors(
        psi_bc=psi_bc,
        psi_ac=psi_ac,
        psi_ab=psi_ab,
        complements_g=complements,
        residuals=residuals
    )

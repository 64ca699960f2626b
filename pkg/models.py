"""
Domain types for the separability certifier
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import enum

import numpy as np

from exceptions import DimsError


# Enums
class Party(enum.Flag):
    """Parties of the tripartite system; combine with | to form subsets"""
    NONE = 0
    A = 1
    B = 2
    C = 4
    AB = 3
    AC = 5
    BC = 6
    ABC = 7


PARTY_ORDER: Tuple[Party, Party, Party] = (Party.A, Party.B, Party.C)


def party_axes(subset: Party) -> List[int]:
    """Tensor axes (0=A, 1=B, 2=C) of the parties in a subset"""
    return [axis for axis, party in enumerate(PARTY_ORDER) if party in subset]


def party_label(subset: Party) -> str:
    """Short label such as 'AB' for a subset"""
    return "".join("ABC"[axis] for axis in party_axes(subset))


class PptVerdict(str, enum.Enum):
    """Outcome of the partial-transpose test"""
    PPT = "PPT"
    NPT = "NPT"


class PencilStatus(str, enum.Enum):
    """Degeneracy status of a matrix pencil"""
    REGULAR = "regular"
    IDENTICALLY_SINGULAR = "identically-singular"


class StateKind(str, enum.Enum):
    """Generator families"""
    CANONICAL = "canonical"
    SEPARABLE = "separable"
    NPT_MIXTURE = "npt"
    PRODUCT_PROJECTOR_SUM = "product_projector_sum"


# Dimensions and states
@dataclass(frozen=True)
class TriDims:
    """Local dimensions of Alice, Bob and Charlie"""
    dA: int
    dB: int
    dC: int

    def __post_init__(self):
        for name, value in (("dA", self.dA), ("dB", self.dB), ("dC", self.dC)):
            if int(value) != value or value < 1:
                raise DimsError(f"{name} must be a positive integer, got {value}")

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.dA, self.dB, self.dC)

    @property
    def total(self) -> int:
        return self.dA * self.dB * self.dC

    def dim_of(self, party: Party) -> int:
        """Dimension of a single party"""
        return self.shape[party_axes(party)[0]]

    @classmethod
    def parse(cls, text: str) -> "TriDims":
        """Parse '2x3xN' notation"""
        parts = text.lower().split("x")
        if len(parts) != 3:
            raise DimsError(f"Expected dims like 2x3x4, got '{text}'")
        try:
            return cls(*(int(p) for p in parts))
        except ValueError:
            raise DimsError(f"Expected dims like 2x3x4, got '{text}'")

    def __str__(self) -> str:
        return f"{self.dA}x{self.dB}x{self.dC}"


@dataclass(frozen=True, eq=False)
class StateVector:
    """Vector on C^dA ⊗ C^dB ⊗ C^dC, Alice slowest"""
    dims: TriDims
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.size != self.dims.total:
            raise DimsError(
                f"StateVector of length {amplitudes.size} does not match dims {self.dims}"
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """
    Operator on C^dA ⊗ C^dB ⊗ C^dC

    `normalized` is False for intermediates (filtered states, partial
    transposes, subtraction remainders) that are not trace-1 states.
    """
    dims: TriDims
    entries: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        n = self.dims.total
        if entries.shape != (n, n):
            raise DimsError(
                f"Operator of shape {entries.shape} does not match dims {self.dims} ({n}x{n})"
            )
        object.__setattr__(self, "entries", entries)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    @property
    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def as_tensor(self) -> np.ndarray:
        """View as a (dA, dB, dC, dA, dB, dC) tensor"""
        return self.entries.reshape(self.dims.shape + self.dims.shape)

    def with_entries(self, entries: np.ndarray, normalized: bool = False) -> "DensityOperator":
        return DensityOperator(self.dims, entries, normalized=normalized)

    def normalize(self) -> "DensityOperator":
        trace = self.trace.real
        if trace <= 0:
            raise DimsError("Cannot trace-normalize an operator with non-positive trace")
        return DensityOperator(self.dims, self.entries / trace, normalized=True)


@dataclass(frozen=True, eq=False)
class BlockGrid:
    """(dA·dB) x (dA·dB) array of dC x dC blocks, blocks[p, q] = <p|rho|q>"""
    dims: TriDims
    blocks: np.ndarray

    def block(self, p: int, q: int) -> np.ndarray:
        return self.blocks[p, q]


# Linear algebra results
@dataclass(frozen=True, eq=False)
class RankKernel:
    """Tolerance-ranked SVD summary"""
    rank: int
    kernel_basis: np.ndarray
    range_basis: np.ndarray
    singular_values: np.ndarray
    threshold: float

    @property
    def kernel_dim(self) -> int:
        return self.kernel_basis.shape[1]

    @property
    def gap(self) -> float:
        """Ratio between the last kept and the first dropped singular value"""
        s = self.singular_values
        if self.rank == 0 or self.rank >= s.size:
            return float("inf")
        dropped = s[self.rank]
        return float(s[self.rank - 1] / dropped) if dropped > 0 else float("inf")


@dataclass(frozen=True, eq=False)
class JointSpectrum:
    """Common eigenbasis (columns) and per-input eigenvalues (rows)"""
    basis: np.ndarray
    eigenvalues: np.ndarray
    residuals: List[float] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class PencilRoots:
    """Finite roots of det(M0 + alpha M1) = 0"""
    roots: np.ndarray
    status: PencilStatus
    n_infinite: int = 0


# PPT and support
@dataclass(frozen=True)
class PptReport:
    """Minimum eigenvalue of every nontrivial partial transpose"""
    min_eigenvalues: Dict[str, float]
    plain_min_eigenvalue: float
    verdict: PptVerdict
    tol: float

    @property
    def is_ppt(self) -> bool:
        return self.verdict == PptVerdict.PPT


@dataclass(frozen=True, eq=False)
class SupportProfile:
    """Local support dimensions and the isometries onto each support"""
    local_dims: Tuple[int, int, int]
    isometries: Tuple[np.ndarray, np.ndarray, np.ndarray]

    def is_full(self, dims: TriDims) -> bool:
        return self.local_dims == dims.shape


# Canonical form
@dataclass(frozen=True, eq=False)
class Pivot:
    """Product pair (e_A, f_B) whose conditional block has full rank"""
    e_a: np.ndarray
    f_b: np.ndarray
    gap: float = float("inf")
    trial: int = 0


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """
    B, C, D in the filtered frame together with the filter that produced them

    rotation_a / rotation_b are unitaries whose pivot column is the pivot
    vector; the state is (W_A ⊗ W_B ⊗ sqrt(F)) (X^† X) (W_A ⊗ W_B ⊗ sqrt(F))^†
    with X the row (DC, DB, D, C, B, I).
    """
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    F: np.ndarray
    pivot: Pivot
    rotation_a: np.ndarray
    rotation_b: np.ndarray
    charlie_filter: np.ndarray

    @property
    def n(self) -> int:
        return self.F.shape[0]


@dataclass(frozen=True, eq=False)
class CanonicalResiduals:
    """Deviations of the filtered state from the canonical form"""
    block_residuals: np.ndarray
    delta_residual: float
    delta_tilde_residual: float
    commutator_norms: Dict[str, float]

    @property
    def max_block_residual(self) -> float:
        return float(self.block_residuals.max())


# Decompositions and certificates
@dataclass(frozen=True, eq=False)
class ProductTerm:
    """Weighted projector onto |a, b, c>; vectors are unit"""
    weight: float
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray


@dataclass(frozen=True, eq=False)
class ProductDecomposition:
    dims: TriDims
    terms: List[ProductTerm]

    @property
    def total_weight(self) -> float:
        return float(sum(term.weight for term in self.terms))


@dataclass(frozen=True)
class VerificationReport:
    residual: float
    relative_residual: float
    marginal_residuals: Dict[str, float]
    passed: bool
    tol: float


@dataclass(frozen=True, eq=False)
class SeparabilityCertificate:
    decomposition: ProductDecomposition
    ppt_report: PptReport
    reconstruction_residual: float
    relative_residual: float
    commutator_norms: Dict[str, float]
    pivot: Pivot
    seed: int
    tolerances: Dict[str, float]
    support_dims: Tuple[int, int, int]
    compressed: bool = False
    pruned_terms: int = 0
    canonical_form: Optional[CanonicalForm] = None
    tool_version: str = ""

    @property
    def verified(self) -> bool:
        """Positive weights and a residual within tolerance relative to max(1, ||rho||_F)"""
        tol = self.tolerances.get("decomposition_tol", 0.0)
        weights_ok = all(term.weight > 0 for term in self.decomposition.terms)
        return weights_ok and self.relative_residual <= tol


# Kernel search
@dataclass(frozen=True, eq=False)
class ProductKernelVector:
    """Elementary tensor |e, f, g> in the kernel of a state"""
    e: np.ndarray
    f: np.ndarray
    g: np.ndarray
    residual: float
    alpha: Optional[complex] = None
    strategy: str = ""


@dataclass(frozen=True, eq=False)
class DerivedRangeVectors:
    psi_bc: np.ndarray
    psi_ac: Optional[np.ndarray]
    psi_ab: List[np.ndarray]
    complements_g: np.ndarray
    residuals: Dict[str, float]


# Generators
@dataclass(frozen=True)
class GenSpec:
    """Everything a generator needs; identical specs give identical output"""
    kind: StateKind
    dims: TriDims
    rank: Optional[int] = None
    seed: int = 0
    radius_b: float = 1.0
    radius_c: float = 1.0
    radius_d: float = 1.0
    f_condition_cap: float = 10.0
    mixing: Optional[float] = None

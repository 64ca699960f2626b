"""
Exception hierarchy for the separability certifier

Every refusal raised by the library derives from SeparabilityError so the
command line can report it by class name.
"""
from typing import Any, List, Optional, Sequence, Tuple


class SeparabilityError(Exception):
    """Base class for all library errors"""


class DimsError(SeparabilityError, ValueError):
    """Operator or vector dimensions do not match the declared TriDims"""


class SubsetError(SeparabilityError, ValueError):
    """Party subset is empty, full, or otherwise not allowed for the operation"""


class HermiticityError(SeparabilityError):
    """Matrix is not Hermitian within tolerance"""

    def __init__(self, message: str, deviation: float):
        super().__init__(message)
        self.deviation = deviation


class FilterSingularError(SeparabilityError):
    """A local filter factor is singular"""

    def __init__(self, message: str, party: str, condition_number: float):
        super().__init__(message)
        self.party = party
        self.condition_number = condition_number


class NotCommutingError(SeparabilityError):
    """Inputs to joint diagonalization are not commuting normal matrices"""

    def __init__(self, message: str, pair: Tuple[int, int], norm: float):
        super().__init__(message)
        self.pair = pair
        self.norm = norm


class NotInRangeError(SeparabilityError):
    """Vector does not lie in the range of the operator"""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class DegenerateVectorError(SeparabilityError):
    """Vector is numerically zero"""


class NotPptError(SeparabilityError):
    """State has a non-positive partial transpose"""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class RankMismatchError(SeparabilityError):
    """Rank of the state does not equal Charlie's support dimension"""

    def __init__(self, message: str, rank: int, expected: int):
        super().__init__(message)
        self.rank = rank
        self.expected = expected


class PivotRankError(SeparabilityError):
    """Conditional block at the pivot is not of full rank"""


class PivotNotFoundError(SeparabilityError):
    """No product pivot with a full-rank conditional block was found"""

    def __init__(self, message: str, trials: int):
        super().__init__(message)
        self.trials = trials


class NotCanonicalizableError(SeparabilityError):
    """Filtered state deviates from the canonical outer-product form"""

    def __init__(self, message: str, offending: Sequence[Any], worst: float):
        super().__init__(message)
        self.offending = list(offending)
        self.worst = worst


class InvalidCanonicalError(SeparabilityError):
    """Canonical data violates its invariants"""


class DecompositionFailedError(SeparabilityError):
    """Constructed decomposition does not reproduce the state"""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class InvalidDecompositionError(SeparabilityError):
    """Decomposition is malformed (negative weight, wrong dimensions)"""


class KernelEmptyError(SeparabilityError):
    """State has full rank, so no kernel vector exists"""


class NoProductKernelVectorError(SeparabilityError):
    """No product vector with an acceptable residual was found in the kernel"""

    def __init__(self, message: str, best_residual: Optional[float]):
        super().__init__(message)
        self.best_residual = best_residual


class StructureViolationError(SeparabilityError):
    """Range vectors derived from a product kernel vector do not factor"""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class InternalConsistencyError(SeparabilityError):
    """Cross-check between redundant computations failed"""


class StateFileError(SeparabilityError):
    """State or certificate file cannot be parsed or validated"""

    def __init__(self, message: str, path: str, line: Optional[int] = None,
                 column: Optional[int] = None, details: Optional[List[str]] = None):
        super().__init__(message)
        self.path = path
        self.line = line
        self.column = column
        self.details = details or []

    def __str__(self) -> str:
        anchor = self.path
        if self.line is not None:
            anchor = f"{anchor}:{self.line}:{self.column or 0}"
        return f"{anchor}: {self.args[0]}"

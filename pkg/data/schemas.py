"""
Pydantic Schemas for state, certificate and canonical-form files
"""
from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Dict, List, Optional

import numpy as np


# Numeric payloads
class ComplexMatrixPayload(BaseModel):
    """Row-major real and imaginary parts of a complex matrix"""
    re: List[List[float]]
    im: List[List[float]]

    @model_validator(mode="after")
    def check_shapes(self):
        re_shape = (len(self.re), len(self.re[0]) if self.re else 0)
        im_shape = (len(self.im), len(self.im[0]) if self.im else 0)
        if any(len(row) != re_shape[1] for row in self.re):
            raise ValueError("re rows have unequal lengths")
        if any(len(row) != im_shape[1] for row in self.im):
            raise ValueError("im rows have unequal lengths")
        if re_shape != im_shape:
            raise ValueError(f"re shape {re_shape} differs from im shape {im_shape}")
        return self

    @property
    def shape(self):
        return (len(self.re), len(self.re[0]) if self.re else 0)

    def to_array(self) -> np.ndarray:
        return np.array(self.re, dtype=float) + 1j * np.array(self.im, dtype=float)

    @classmethod
    def from_array(cls, matrix: np.ndarray) -> "ComplexMatrixPayload":
        matrix = np.asarray(matrix, dtype=complex)
        return cls(re=matrix.real.tolist(), im=matrix.imag.tolist())


class VectorPayload(BaseModel):
    """Real and imaginary parts of a complex vector"""
    re: List[float]
    im: List[float]

    @model_validator(mode="after")
    def check_lengths(self):
        if len(self.re) != len(self.im):
            raise ValueError(f"re length {len(self.re)} differs from im length {len(self.im)}")
        return self

    def to_array(self) -> np.ndarray:
        return np.array(self.re, dtype=float) + 1j * np.array(self.im, dtype=float)

    @classmethod
    def from_array(cls, vector: np.ndarray) -> "VectorPayload":
        vector = np.asarray(vector, dtype=complex).reshape(-1)
        return cls(re=vector.real.tolist(), im=vector.imag.tolist())


def _check_dims(value: List[int]) -> List[int]:
    if len(value) != 3:
        raise ValueError(f"dims must have 3 entries, got {len(value)}")
    if any(d < 1 for d in value):
        raise ValueError(f"dims must be positive, got {value}")
    return value


# State files
class StateMeta(BaseModel):
    seed: Optional[int] = None
    kind: Optional[str] = None
    normalized: bool = True


class StateFile(BaseModel):
    dims: List[int]
    matrix: ComplexMatrixPayload
    meta: StateMeta = Field(default_factory=StateMeta)

    @field_validator("dims")
    @classmethod
    def check_dims(cls, value: List[int]) -> List[int]:
        return _check_dims(value)

    @model_validator(mode="after")
    def check_matrix_size(self):
        total = int(np.prod(self.dims))
        if self.matrix.shape != (total, total):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match dims {self.dims} ({total}x{total})")
        return self


# Certificate files
class TermPayload(BaseModel):
    w: float = Field(gt=0)
    a: VectorPayload
    b: VectorPayload
    c: VectorPayload


class ResidualsPayload(BaseModel):
    reconstruction: float
    reconstruction_relative: float = 0.0
    commutators: List[float]
    ppt_min_eigs: List[float]

    @field_validator("commutators")
    @classmethod
    def check_commutators(cls, value: List[float]) -> List[float]:
        if len(value) != 9:
            raise ValueError(f"expected 9 commutator norms, got {len(value)}")
        return value

    @field_validator("ppt_min_eigs")
    @classmethod
    def check_ppt(cls, value: List[float]) -> List[float]:
        if len(value) != 6:
            raise ValueError(f"expected 6 partial-transpose minima, got {len(value)}")
        return value


class PivotPayload(BaseModel):
    e_a: VectorPayload
    f_b: VectorPayload
    trial: int = 0


class PipelinePayload(BaseModel):
    pivot: PivotPayload
    seed: int
    tolerances: Dict[str, float]
    tool_version: str
    support_dims: List[int]
    compressed: bool = False
    pruned_terms: int = Field(default=0, ge=0)


class CertificateFile(BaseModel):
    dims: List[int]
    terms: List[TermPayload]
    residuals: ResidualsPayload
    pipeline: PipelinePayload

    @field_validator("dims")
    @classmethod
    def check_dims(cls, value: List[int]) -> List[int]:
        return _check_dims(value)

    @model_validator(mode="after")
    def check_term_lengths(self):
        for index, term in enumerate(self.terms):
            lengths = [len(term.a.re), len(term.b.re), len(term.c.re)]
            if lengths != list(self.dims):
                raise ValueError(f"term {index} has vector lengths {lengths}, expected {self.dims}")
        return self


# Canonical-form files
class CanonicalResidualsPayload(BaseModel):
    max_block: float
    delta: float
    delta_tilde: float
    commutators: List[float]


class CanonicalFile(BaseModel):
    dims: List[int]
    B: ComplexMatrixPayload
    C: ComplexMatrixPayload
    D: ComplexMatrixPayload
    F: ComplexMatrixPayload
    pivot: PivotPayload
    rotation_a: ComplexMatrixPayload
    rotation_b: ComplexMatrixPayload
    charlie_filter: ComplexMatrixPayload
    residuals: CanonicalResidualsPayload

    @field_validator("dims")
    @classmethod
    def check_dims(cls, value: List[int]) -> List[int]:
        return _check_dims(value)

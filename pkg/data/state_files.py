"""
State and Certificate Files
Load and save JSON state, certificate and canonical-form files with
line-anchored diagnostics
"""
from pathlib import Path
from typing import Tuple, Type, TypeVar, Union
import json
import logging

import numpy as np
from pydantic import BaseModel, ValidationError

from config import settings
from exceptions import StateFileError
from models import (
    CanonicalForm, CanonicalResiduals, DensityOperator, Pivot, ProductDecomposition,
    ProductTerm, SeparabilityCertificate, TriDims
)
from data.schemas import (
    CanonicalFile, CanonicalResidualsPayload, CertificateFile, ComplexMatrixPayload,
    PipelinePayload, PivotPayload, ResidualsPayload, StateFile, StateMeta, TermPayload,
    VectorPayload
)
from tensor.tensor_core import frobenius_close

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
Model = TypeVar("Model", bound=BaseModel)


def dumps(model: BaseModel) -> str:
    """Byte-stable JSON: sorted keys, repr floats, trailing newline"""
    return json.dumps(model.model_dump(), sort_keys=True, indent=2) + "\n"


def _write(path: PathLike, model: BaseModel) -> None:
    try:
        Path(path).write_text(dumps(model), encoding="utf-8")
    except OSError as e:
        raise StateFileError(f"cannot write file: {e.strerror}", path=str(path))
    logger.info(f"Wrote {type(model).__name__} to {path}")


def _read(path: PathLike, model_cls: Type[Model]) -> Model:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise StateFileError(f"cannot read file: {e.strerror}", path=str(path))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise StateFileError(f"invalid JSON: {e.msg}", path=str(path), line=e.lineno, column=e.colno)
    try:
        return model_cls.model_validate(data)
    except ValidationError as e:
        errors = e.errors()
        details = [f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in errors]
        line, column = _locate(text, errors[0]["loc"])
        raise StateFileError(
            f"{model_cls.__name__} validation failed: {details[0]}",
            path=str(path),
            line=line,
            column=column,
            details=details
        )


def _locate(text: str, loc) -> Tuple[int, int]:
    """
    Line and column of the deepest key named by a validation location

    A list index before a key selects that occurrence of the key, so
    terms.2.w lands on the third "w" after "terms". Document-level errors
    map to 1:1.
    """
    position, skip = 0, 0
    for part in loc:
        if isinstance(part, int):
            skip = part
            continue
        found = text.find(f'"{part}"', position)
        for _ in range(skip):
            if found < 0:
                break
            found = text.find(f'"{part}"', found + 1)
        if found < 0:
            break
        position, skip = found, 0
    line = text.count("\n", 0, position) + 1
    column = position - (text.rfind("\n", 0, position) + 1) + 1
    return line, column


# States
def state_to_file(rho: DensityOperator, seed=None, kind=None) -> StateFile:
    return StateFile(
        dims=list(rho.dims.shape),
        matrix=ComplexMatrixPayload.from_array(rho.entries),
        meta=StateMeta(seed=seed, kind=kind, normalized=rho.normalized)
    )


def save_state(path: PathLike, rho: DensityOperator, seed=None, kind=None) -> None:
    _write(path, state_to_file(rho, seed=seed, kind=kind))


def load_state(path: PathLike) -> DensityOperator:
    """
    Read a state file and check Hermiticity

    Raises:
        StateFileError: unreadable, malformed, or non-Hermitian content
    """
    payload = _read(path, StateFile)
    entries = payload.matrix.to_array()
    if not frobenius_close(entries, entries.conj().T, settings.hermiticity_tol):
        deviation = float(np.linalg.norm(entries - entries.conj().T))
        raise StateFileError(f"matrix is not Hermitian (deviation {deviation:.3e})", path=str(path))
    return DensityOperator(TriDims(*payload.dims), entries, normalized=payload.meta.normalized)


# Certificates
def certificate_to_file(cert: SeparabilityCertificate) -> CertificateFile:
    dec = cert.decomposition
    return CertificateFile(
        dims=list(dec.dims.shape),
        terms=[
            TermPayload(
                w=term.weight,
                a=VectorPayload.from_array(term.a),
                b=VectorPayload.from_array(term.b),
                c=VectorPayload.from_array(term.c)
            )
            for term in dec.terms
        ],
        residuals=ResidualsPayload(
            reconstruction=cert.reconstruction_residual,
            reconstruction_relative=cert.relative_residual,
            commutators=list(cert.commutator_norms.values()),
            ppt_min_eigs=list(cert.ppt_report.min_eigenvalues.values())
        ),
        pipeline=PipelinePayload(
            pivot=PivotPayload(
                e_a=VectorPayload.from_array(cert.pivot.e_a),
                f_b=VectorPayload.from_array(cert.pivot.f_b),
                trial=cert.pivot.trial
            ),
            seed=cert.seed,
            tolerances=cert.tolerances,
            tool_version=cert.tool_version,
            support_dims=list(cert.support_dims),
            compressed=cert.compressed,
            pruned_terms=cert.pruned_terms
        )
    )


def save_certificate(path: PathLike, cert: SeparabilityCertificate) -> None:
    _write(path, certificate_to_file(cert))


def load_certificate(path: PathLike) -> CertificateFile:
    return _read(path, CertificateFile)


def decomposition_from_file(payload: CertificateFile) -> ProductDecomposition:
    """Product decomposition described by a certificate file, as written"""
    terms = [
        ProductTerm(term.w, term.a.to_array(), term.b.to_array(), term.c.to_array())
        for term in payload.terms
    ]
    return ProductDecomposition(TriDims(*payload.dims), terms)


# Canonical forms
def canonical_to_file(cf: CanonicalForm, residuals: CanonicalResiduals) -> CanonicalFile:
    return CanonicalFile(
        dims=[2, 3, cf.n],
        B=ComplexMatrixPayload.from_array(cf.B),
        C=ComplexMatrixPayload.from_array(cf.C),
        D=ComplexMatrixPayload.from_array(cf.D),
        F=ComplexMatrixPayload.from_array(cf.F),
        pivot=PivotPayload(
            e_a=VectorPayload.from_array(cf.pivot.e_a),
            f_b=VectorPayload.from_array(cf.pivot.f_b),
            trial=cf.pivot.trial
        ),
        rotation_a=ComplexMatrixPayload.from_array(cf.rotation_a),
        rotation_b=ComplexMatrixPayload.from_array(cf.rotation_b),
        charlie_filter=ComplexMatrixPayload.from_array(cf.charlie_filter),
        residuals=CanonicalResidualsPayload(
            max_block=residuals.max_block_residual,
            delta=residuals.delta_residual,
            delta_tilde=residuals.delta_tilde_residual,
            commutators=list(residuals.commutator_norms.values())
        )
    )


def save_canonical(path: PathLike, cf: CanonicalForm, residuals: CanonicalResiduals) -> None:
    _write(path, canonical_to_file(cf, residuals))


def load_canonical(path: PathLike) -> CanonicalForm:
    payload = _read(path, CanonicalFile)
    return CanonicalForm(
        B=payload.B.to_array(),
        C=payload.C.to_array(),
        D=payload.D.to_array(),
        F=payload.F.to_array(),
        pivot=Pivot(
            e_a=payload.pivot.e_a.to_array(),
            f_b=payload.pivot.f_b.to_array(),
            trial=payload.pivot.trial
        ),
        rotation_a=payload.rotation_a.to_array(),
        rotation_b=payload.rotation_b.to_array(),
        charlie_filter=payload.charlie_filter.to_array()
    )

"""Shared test fixtures"""
import numpy as np
import pytest

from models import DensityOperator, TriDims


def random_density(dims: TriDims, seed: int, rank: int = None) -> DensityOperator:
    """Random normalized state of the given rank"""
    rng = np.random.Generator(np.random.PCG64(seed))
    rank = dims.total if rank is None else rank
    x = rng.standard_normal((dims.total, rank)) + 1j * rng.standard_normal((dims.total, rank))
    rho = x @ x.conj().T
    return DensityOperator(dims, rho / np.trace(rho).real)


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def basis(d: int, i: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[i] = 1.0
    return e


@pytest.fixture
def dims_234():
    """Dims (2, 3, 4)"""
    return TriDims(2, 3, 4)


@pytest.fixture
def mixed_234(dims_234):
    """Full-rank random state on 2x3x4"""
    return random_density(dims_234, seed=7)


def pad_charlie(rho: DensityOperator, extra: int) -> DensityOperator:
    """Embed rho into a larger Charlie space with zero rows and columns"""
    n = rho.dims.dC
    pad = np.zeros((n + extra, n), dtype=complex)
    pad[:n, :n] = np.eye(n)
    embed = np.kron(np.eye(rho.dims.dA * rho.dims.dB), pad)
    dims = TriDims(rho.dims.dA, rho.dims.dB, n + extra)
    return DensityOperator(dims, embed @ rho.entries @ embed.conj().T)

"""Dense linear algebra for the small Hilbert spaces used here.

Matrix functions go through the Hermitian eigendecomposition. Eigenvalues in
[-EIGEN_CLAMP, 0) are clamped to zero before sqrt/log; anything more negative
raises NotPositiveSemidefiniteError.

Most helpers accept either a validated value (DensityMatrix, HermitianOperator,
StateVector) or a raw ndarray. Raw arrays may carry leading batch axes, which is
what the sweep engine uses to process a whole time grid at once.
"""

from __future__ import annotations

import logging
from typing import Tuple, Union

import numpy as np
from scipy.special import xlogy

from .errors import InvalidInputError, NotPositiveSemidefiniteError
from .types import (
    EIGEN_CLAMP,
    HERMITIAN_ATOL,
    Bipartition,
    DensityMatrix,
    HermitianOperator,
    Keep,
    StateVector,
)

logger = logging.getLogger(__name__)

MatrixLike = Union[DensityMatrix, HermitianOperator, np.ndarray]


def entries(a) -> np.ndarray:
    if isinstance(a, (DensityMatrix, HermitianOperator)):
        return a.entries
    if isinstance(a, StateVector):
        return a.amplitudes
    return np.asarray(a, dtype=complex)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def clamp_spectrum(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    w_min = float(np.min(w)) if w.size else 0.0
    if w_min < -EIGEN_CLAMP:
        raise NotPositiveSemidefiniteError(f"eigenvalue {w_min:.3e} below -{EIGEN_CLAMP:g}")
    if w_min < -1e-12:
        logger.warning("clamping eigenvalue %.3e to zero", w_min)
    return np.clip(w, 0.0, None)


def _same_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-2:] != b.shape[-2:]:
        raise InvalidInputError(f"dimension mismatch: {a.shape[-2:]} vs {b.shape[-2:]}")


# -----------------------------
# Eigendecomposition and matrix functions
# -----------------------------

def hermitian_eigs(a: MatrixLike) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and unitary eigenvector matrix of a Hermitian matrix."""
    arr = entries(a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {arr.shape}")
    dev = float(np.max(np.abs(arr - arr.conj().T)))
    if dev > HERMITIAN_ATOL:
        raise InvalidInputError(f"matrix is not Hermitian (max |A - A^dagger| = {dev:.3e})")
    w, v = np.linalg.eigh(arr)
    return w[::-1], v[:, ::-1]


def psd_sqrt(rho: MatrixLike) -> np.ndarray:
    arr = entries(rho)
    w, v = np.linalg.eigh(arr)
    w = clamp_spectrum(w)
    return (v * np.sqrt(w)[..., None, :]) @ dagger(v)


def von_neumann_entropy(rho: MatrixLike, log_base: float = np.e):
    """S(rho) = -Tr rho log rho with 0 log 0 = 0; log_base picks nats (e) or bits (2)."""
    w = clamp_spectrum(np.linalg.eigvalsh(entries(rho)))
    s = -np.sum(xlogy(w, w), axis=-1) / np.log(log_base)
    return _scalar(np.maximum(s, 0.0))


def purity(rho: MatrixLike):
    arr = entries(rho)
    return _scalar(np.sum(np.abs(arr) ** 2, axis=(-2, -1)))


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


# -----------------------------
# Partial trace
# -----------------------------

def reduce_pure(psi: np.ndarray, part: Bipartition, keep: Keep = Keep.SYSTEM) -> np.ndarray:
    """Marginal of |psi><psi| for raw (batched) state vectors of length dim_S * dim_E."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[-1] != part.dim:
        raise InvalidInputError(f"state of length {psi.shape[-1]} does not match bipartition {part.dim}")
    m = psi.reshape(psi.shape[:-1] + (part.dim_system, part.dim_environment))
    if keep is Keep.ENVIRONMENT:
        m = np.swapaxes(m, -1, -2)
    return m @ dagger(m)


def reduce_mixed(rho: np.ndarray, part: Bipartition, keep: Keep = Keep.SYSTEM) -> np.ndarray:
    """Marginal of raw (batched) joint density matrices of side dim_S * dim_E."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (part.dim, part.dim):
        raise InvalidInputError(f"matrix of shape {rho.shape[-2:]} does not match bipartition {part.dim}")
    t = rho.reshape(rho.shape[:-2] + (part.dim_system, part.dim_environment, part.dim_system, part.dim_environment))
    if keep is Keep.SYSTEM:
        return np.einsum("...ijkj->...ik", t)
    return np.einsum("...ijil->...jl", t)


def partial_trace(state: Union[StateVector, DensityMatrix, np.ndarray], part: Bipartition,
                  keep: Keep = Keep.SYSTEM) -> DensityMatrix:
    arr = entries(state)
    if arr.ndim == 1:
        return DensityMatrix(reduce_pure(arr, part, keep))
    if arr.ndim != 2:
        raise InvalidInputError(f"expected one state vector or density matrix, got shape {arr.shape}")
    return DensityMatrix(reduce_mixed(arr, part, keep))


# -----------------------------
# Fidelity and concurrence
# -----------------------------

def fidelity(rho1: MatrixLike, rho2: MatrixLike):
    """(Tr sqrt(sqrt(rho2) rho1 sqrt(rho2)))^2, computed as the squared nuclear norm of sqrt(rho2) sqrt(rho1)."""
    a, b = entries(rho1), entries(rho2)
    _same_dims(a, b)
    sv = np.linalg.svd(psd_sqrt(b) @ psd_sqrt(a), compute_uv=False)
    return _scalar(np.clip(np.sum(sv, axis=-1) ** 2, 0.0, 1.0))


def concurrence_pure(psi: Union[StateVector, np.ndarray], part: Bipartition):
    """sqrt(2 (1 - P(rho_S))) of a pure bipartite state with a qubit system."""
    if part.dim_system != 2:
        raise InvalidInputError(f"pure-state concurrence needs a qubit system, got dim {part.dim_system}")
    p = purity(reduce_pure(entries(psi), part))
    return _scalar(np.sqrt(np.clip(2.0 * (1.0 - np.asarray(p)), 0.0, 1.0)))


# -----------------------------
# Unitary evolution
# -----------------------------

class Propagator:
    """exp(-iHt) from one eigendecomposition of H, reusable across states and times."""

    def __init__(self, hamiltonian: Union[HermitianOperator, np.ndarray]):
        w, v = hermitian_eigs(hamiltonian)
        self.energies = w
        self.vectors = v

    @property
    def dim(self) -> int:
        return int(self.energies.size)

    def evolve_many(self, psi: np.ndarray, times) -> np.ndarray:
        """Rows are exp(-iHt)|psi> for each t in times."""
        psi = entries(psi)
        if psi.shape != (self.dim,):
            raise InvalidInputError(f"state of length {psi.shape[-1]} does not match operator dim {self.dim}")
        coeff = self.vectors.conj().T @ psi
        phases = np.exp(-1j * np.outer(np.atleast_1d(times), self.energies))
        return (phases * coeff) @ self.vectors.T

    def evolve(self, psi: np.ndarray, t: float) -> np.ndarray:
        return self.evolve_many(psi, [t])[0]


def evolve_unitary(psi: Union[StateVector, np.ndarray], hamiltonian: Union[HermitianOperator, np.ndarray],
                   t: float) -> StateVector:
    out = Propagator(hamiltonian).evolve(entries(psi), t)
    return StateVector(out)


# -----------------------------
# Random states (property suites)
# -----------------------------

def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-ensemble density matrix G G^dagger / Tr."""
    k = dim if rank is None else rank
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real

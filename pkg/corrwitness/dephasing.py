"""Two-level system dephased by a single bosonic mode.

H = eps sigma_z x 1 + 1 x omega a^dagger a + sigma_z x g0 (a + a^dagger), |e> first,
sigma_z|e> = +|e>.

Each sigma_z branch s = +-1 sees the field displaced by s*alpha(t) (up to a phase
common to both branches) and picks up exp(-i eps s t). The reduced state therefore
follows from coherent-state overlaps alone; the truncated-Fock oracle below
builds the same Hamiltonian in the number basis and checks it.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from .errors import ConsistencyError, InvalidInputError, TruncationError
from .linalg import Propagator, reduce_pure
from .sampling import haar_unitary
from .types import (
    Bipartition,
    CorrelatedStateSpec,
    DensityMatrix,
    DephasingParams,
    FockCutoff,
    HermitianOperator,
    StateFamily,
    StateVector,
)

logger = logging.getLogger(__name__)

# Parameters of the reference study.
EPSILON = 1.0
OMEGA = 1.0
G0 = 0.1
Z = 1.0 + 0.0j

DEFAULT_CUTOFF = FockCutoff(40)
MAX_CUTOFF = 320
# Minimal truncated norm of the field states |0>, |z>.
TRUNCATION_NORM = 1.0 - 1e-12
# Doubling n_max must move the oracle state less than this (trace norm).
CONVERGENCE_TOL = 1e-10
PSD_TOL = 1e-10

FRAMES = ("lab", "rotating")

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
# Columns |-1_x>, |+1_x>.
SIGMA_X_BASIS = np.array([[1.0, 1.0], [-1.0, 1.0]], dtype=complex) / np.sqrt(2.0)


# -----------------------------
# Coherent-state algebra
# -----------------------------

def coherent_overlap(x, y):
    """<x|y> = exp(-|x|^2/2 - |y|^2/2 + x* y)."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    out = np.exp(-0.5 * np.abs(x) ** 2 - 0.5 * np.abs(y) ** 2 + np.conj(x) * y)
    return complex(out) if out.ndim == 0 else out


def alpha(params: DephasingParams, t):
    """alpha(t) = g0/omega (1 - exp(i omega t))."""
    t = np.asarray(t, dtype=float)
    out = params.g0 / params.omega * (1.0 - np.exp(1j * params.omega * t))
    return complex(out) if out.ndim == 0 else out


def phase_A(params: DephasingParams, t):
    """A(t) = exp((alpha z* - alpha* z) / 2); unit modulus."""
    a = np.asarray(alpha(params, t))
    z = params.z
    out = np.exp(0.5 * (a * np.conj(z) - np.conj(a) * z))
    return complex(out) if out.ndim == 0 else out


def normalization_C(lam: float, z: complex) -> float:
    """C_lambda, the norm of (1 - lambda)|0> + lambda|z>."""
    if not 0.0 <= lam <= 1.0:
        raise InvalidInputError(f"lambda must lie in [0, 1], got {lam}")
    c2 = (1.0 - lam) ** 2 + lam ** 2 + 2.0 * lam * (1.0 - lam) * coherent_overlap(0.0, z).real
    return float(np.sqrt(c2))


def branch_amplitudes(spec: CorrelatedStateSpec, z: complex) -> np.ndarray:
    """Weights c[s, k] of |s> x |beta_k>, s in (e, g), beta in (0, z)."""
    u = spec.unitary
    c = normalization_C(spec.lam, z)
    r0 = (1.0 - spec.lam) / c
    rz = spec.lam / c
    return np.array(
        [
            [spec.b1 * u[0, 0] + spec.b2 * u[0, 1] * r0, spec.b2 * u[0, 1] * rz],
            [spec.b1 * u[1, 0] + spec.b2 * u[1, 1] * r0, spec.b2 * u[1, 1] * rz],
        ],
        dtype=complex,
    )


# -----------------------------
# Closed-form reduced dynamics
# -----------------------------

def population_e(params: DephasingParams, spec: CorrelatedStateSpec) -> float:
    c = branch_amplitudes(spec, params.z)[0]
    labels = np.array([0.0, params.z], dtype=complex)
    gram = coherent_overlap(labels[:, None], labels[None, :])  # gram[j, i] = <beta_j|beta_i>
    p = np.einsum("i,j,ji->", c, np.conj(c), gram).real
    return float(np.clip(p, 0.0, 1.0))


def coherence_factor(params: DephasingParams, spec: CorrelatedStateSpec, t, frame: str = "lab"):
    """<e|rho_S(t)|g>.

    frame="rotating" drops the free phase exp(-2i eps t); that is the frame co-rotating
    with H_S + H_E, where the closed form carries no eps dependence.
    """
    if frame not in FRAMES:
        raise InvalidInputError(f"frame must be one of {FRAMES}, got {frame!r}")
    t = np.asarray(t, dtype=float)
    c = branch_amplitudes(spec, params.z)
    a = np.asarray(alpha(params, t))
    big_a = np.asarray(phase_A(params, t))
    z = params.z

    # Branch e displaces by +alpha, branch g by -alpha.
    e_labels = (a, z + a)
    g_labels = (-a, z - a)
    e_phase = (1.0, big_a)
    g_phase = (1.0, big_a)  # conj of the -alpha displacement phase on |z>

    b = np.zeros(np.shape(t), dtype=complex)
    for i in range(2):
        for j in range(2):
            weight = c[0, i] * np.conj(c[1, j])
            if weight == 0.0:
                continue
            b = b + weight * e_phase[i] * g_phase[j] * coherent_overlap(g_labels[j], e_labels[i])
    if frame == "lab":
        b = b * np.exp(-2j * params.epsilon * t)
    return complex(b) if b.ndim == 0 else b


def reduced_states(params: DephasingParams, spec: CorrelatedStateSpec, times, frame: str = "lab") -> np.ndarray:
    """Stack of 2x2 reduced states, shape (len(times), 2, 2)."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    p = population_e(params, spec)
    b = np.asarray(coherence_factor(params, spec, times, frame))
    excess = float(np.max(np.abs(b) ** 2)) - p * (1.0 - p)
    if excess > PSD_TOL:
        raise ConsistencyError(f"closed-form reduced state not PSD (|B|^2 - p(1-p) = {excess:.3e})")
    rho = np.empty((times.size, 2, 2), dtype=complex)
    rho[:, 0, 0] = p
    rho[:, 1, 1] = 1.0 - p
    rho[:, 0, 1] = b
    rho[:, 1, 0] = np.conj(b)
    return rho


def reduced_state(params: DephasingParams, spec: CorrelatedStateSpec, t: float, frame: str = "lab") -> DensityMatrix:
    return DensityMatrix(reduced_states(params, spec, [t], frame)[0])


# -----------------------------
# State families
# -----------------------------

def family_spec(family: StateFamily, b1: complex, b2: complex, lam: float,
                rng: Optional[np.random.Generator] = None) -> CorrelatedStateSpec:
    """Map a named family onto the general (b1, b2, lambda, U) form.

    Swapped and SigmaX put Omega_lambda on the b1 branch, so their amplitudes enter
    the general form in swapped order.
    """
    if family is StateFamily.ORIGINAL:
        return CorrelatedStateSpec(b1, b2, lam)
    if family is StateFamily.SWAPPED:
        return CorrelatedStateSpec(b2, b1, lam, SWAP)
    if family is StateFamily.SIGMA_X:
        return CorrelatedStateSpec(b2, b1, lam, SIGMA_X_BASIS)
    if family is StateFamily.HAAR_RANDOM:
        if rng is None:
            raise InvalidInputError("the Haar-random family needs a random generator")
        return CorrelatedStateSpec(b1, b2, lam, haar_unitary(rng))
    raise InvalidInputError(f"unknown state family {family!r}")


# -----------------------------
# Truncated-Fock oracle
# -----------------------------

def coherent_vector(z: complex, cutoff: FockCutoff) -> np.ndarray:
    """Number-basis amplitudes of |z> up to n_max."""
    amp = np.empty(cutoff.dim, dtype=complex)
    amp[0] = np.exp(-0.5 * abs(z) ** 2)
    for n in range(1, cutoff.dim):
        amp[n] = amp[n - 1] * z / np.sqrt(n)
    return amp


def _check_truncation(z: complex, cutoff: FockCutoff) -> None:
    norm2 = float(np.sum(np.abs(coherent_vector(z, cutoff)) ** 2))
    if norm2 < TRUNCATION_NORM:
        raise TruncationError(f"n_max={cutoff.n_max} keeps only {norm2:.15f} of |z={z}>")


def total_state_fock(params: DephasingParams, spec: CorrelatedStateSpec,
                     cutoff: FockCutoff = DEFAULT_CUTOFF) -> StateVector:
    _check_truncation(params.z, cutoff)
    vac = np.zeros(cutoff.dim, dtype=complex)
    vac[0] = 1.0
    omega_lam = ((1.0 - spec.lam) * vac + spec.lam * coherent_vector(params.z, cutoff)) / normalization_C(
        spec.lam, params.z
    )
    u = spec.unitary
    psi = spec.b1 * np.kron(u[:, 0], vac) + spec.b2 * np.kron(u[:, 1], omega_lam)
    return StateVector(psi / np.linalg.norm(psi))


def fock_hamiltonian(params: DephasingParams, cutoff: FockCutoff = DEFAULT_CUTOFF) -> HermitianOperator:
    n = np.arange(cutoff.dim, dtype=float)
    a = np.diag(np.sqrt(n[1:]), k=1).astype(complex)
    sz = np.diag([1.0, -1.0]).astype(complex)
    h = (
        params.epsilon * np.kron(sz, np.eye(cutoff.dim))
        + params.omega * np.kron(np.eye(2), np.diag(n))
        + params.g0 * np.kron(sz, a + a.conj().T)
    )
    return HermitianOperator(h)


def evolve_total_fock(params: DephasingParams, spec: CorrelatedStateSpec, times,
                      cutoff: FockCutoff = DEFAULT_CUTOFF) -> np.ndarray:
    """Rows are the total state at each time, shape (len(times), 2 (n_max + 1))."""
    psi0 = total_state_fock(params, spec, cutoff).amplitudes
    return Propagator(fock_hamiltonian(params, cutoff)).evolve_many(psi0, times)


def _oracle_at(params, spec, times, cutoff) -> np.ndarray:
    rows = evolve_total_fock(params, spec, times, cutoff)
    return reduce_pure(rows, Bipartition(2, cutoff.dim))


def oracle_reduced_states(params: DephasingParams, spec: CorrelatedStateSpec, times,
                          cutoff: FockCutoff = DEFAULT_CUTOFF, converge: bool = True) -> np.ndarray:
    """Brute-force reduced states, doubling n_max until the result stops moving."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    rho = _oracle_at(params, spec, times, cutoff)
    if not converge:
        return rho
    while True:
        finer = cutoff.doubled()
        if finer.n_max > MAX_CUTOFF:
            raise TruncationError(f"Fock oracle did not converge below n_max={MAX_CUTOFF}")
        rho_finer = _oracle_at(params, spec, times, finer)
        moved = 0.5 * np.max(np.sum(np.abs(np.linalg.eigvalsh(rho_finer - rho)), axis=-1))
        if moved < CONVERGENCE_TOL:
            return rho
        logger.debug("Fock oracle moved %.3e at n_max=%d; doubling", moved, cutoff.n_max)
        cutoff, rho = finer, rho_finer


def oracle_reduced_state(params: DephasingParams, spec: CorrelatedStateSpec, t: float,
                         cutoff: FockCutoff = DEFAULT_CUTOFF) -> DensityMatrix:
    return DensityMatrix(oracle_reduced_states(params, spec, [t], cutoff)[0])

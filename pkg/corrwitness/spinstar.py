"""Central spin coupled to N bath spins by H = A0 (sigma_+ J_- + sigma_- J_+).

The correlated initial states only involve the bath Dicke states chi_+ = |N/2, N/2>
and chi_- = |N/2, N/2 - 1>. H conserves sigma_z/2 + J_z, so the dynamics stays in
the five kets

    |e,chi_+>, |g,chi_+>, |e,chi_->, |g,chi_->, |e,chi_-->

with chi_-- = |N/2, N/2 - 2>. The brute-force oracle builds H on all 2^(N+1)
product states instead.
"""

from __future__ import annotations

import functools
import logging

import numpy as np

from .errors import InvalidInputError, OracleLimitError
from .linalg import Propagator, reduce_pure
from .types import Bipartition, CorrelatedStateSpec, DensityMatrix, HermitianOperator, SpinStarParams

logger = logging.getLogger(__name__)

A0 = 1.0
N_BATH = 20
ORACLE_MAX_N = 12
TIME_POINTS = 2000
# Rabi periods of the dominant block covered by the default window.
RABI_PERIODS = 5

RAISE = "raise"
LOWER = "lower"


def ladder_coefficient(j: float, m: float, direction: str) -> float:
    """<j, m +- 1| J_+- |j, m>; zero at the end of the ladder."""
    if direction not in (RAISE, LOWER):
        raise InvalidInputError(f"direction must be {RAISE!r} or {LOWER!r}, got {direction!r}")
    if j < 0 or not float(2 * j).is_integer() or not float(j - m).is_integer() or abs(m) > j:
        raise InvalidInputError(f"invalid angular momentum pair (j={j}, m={m})")
    if direction == RAISE:
        return 0.0 if m + 1 > j else float(np.sqrt(j * (j + 1) - m * (m + 1)))
    return 0.0 if m - 1 < -j else float(np.sqrt(j * (j + 1) - m * (m - 1)))


def hamiltonian_subspace(params: SpinStarParams) -> HermitianOperator:
    j = params.n_bath / 2.0
    h = np.zeros((5, 5), dtype=complex)
    h[1, 2] = h[2, 1] = params.a0 * ladder_coefficient(j, j, LOWER)
    h[3, 4] = h[4, 3] = params.a0 * ladder_coefficient(j, j - 1, LOWER)
    return HermitianOperator(h)


@functools.lru_cache(maxsize=32)
def subspace_propagator(params: SpinStarParams) -> Propagator:
    return Propagator(hamiltonian_subspace(params))


def excitation_subspace(params: SpinStarParams) -> np.ndarray:
    """Diagonal of sigma_z/2 + J_z on the subspace kets."""
    j = params.n_bath / 2.0
    return np.array([0.5 + j, -0.5 + j, 0.5 + j - 1.0, -0.5 + j - 1.0, 0.5 + j - 2.0])


def bath_weights(lam: float) -> tuple:
    """Coefficients of chi_+ and chi_- in F_lambda."""
    c = 1.0 / np.sqrt(lam ** 2 + (1.0 - lam) ** 2)
    return c * (1.0 - lam), c * lam


def initial_subspace_state(spec: CorrelatedStateSpec) -> np.ndarray:
    u = spec.unitary
    f_plus, f_minus = bath_weights(spec.lam)
    return np.array(
        [
            spec.b1 * u[0, 0] + spec.b2 * u[0, 1] * f_plus,
            spec.b1 * u[1, 0] + spec.b2 * u[1, 1] * f_plus,
            spec.b2 * u[0, 1] * f_minus,
            spec.b2 * u[1, 1] * f_minus,
            0.0,
        ],
        dtype=complex,
    )


def _subspace_marginal(v: np.ndarray) -> np.ndarray:
    # Rows: system (e, g); columns: bath (chi+, chi-, chi--).
    m = np.zeros(v.shape[:-1] + (2, 3), dtype=complex)
    m[..., 0, 0] = v[..., 0]
    m[..., 1, 0] = v[..., 1]
    m[..., 0, 1] = v[..., 2]
    m[..., 1, 1] = v[..., 3]
    m[..., 0, 2] = v[..., 4]
    return m @ np.conj(np.swapaxes(m, -1, -2))


def evolve_subspace(params: SpinStarParams, spec: CorrelatedStateSpec, times) -> np.ndarray:
    return subspace_propagator(params).evolve_many(initial_subspace_state(spec), times)


def reduced_states_spinstar(params: SpinStarParams, spec: CorrelatedStateSpec, times) -> np.ndarray:
    """Stack of central-spin states, shape (len(times), 2, 2)."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    return _subspace_marginal(evolve_subspace(params, spec, times))


def reduced_state_spinstar(params: SpinStarParams, spec: CorrelatedStateSpec, t: float) -> DensityMatrix:
    return DensityMatrix(reduced_states_spinstar(params, spec, [t])[0])


def default_time_grid(params: SpinStarParams, points: int = TIME_POINTS) -> np.ndarray:
    """[0, 10 pi / (A0 sqrt N)) with `points` samples."""
    t_max = 2.0 * np.pi * RABI_PERIODS / params.rabi_frequency
    return np.linspace(0.0, t_max, points, endpoint=False)


# -----------------------------
# Full-space oracle
# -----------------------------

_SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |e><g|, e first
_SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def _site_operator(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for k in range(n_sites):
        out = np.kron(out, op if k == site else np.eye(2, dtype=complex))
    return out


def _check_oracle_size(params: SpinStarParams) -> None:
    if params.n_bath > ORACLE_MAX_N:
        raise OracleLimitError(f"brute-force oracle supports N <= {ORACLE_MAX_N}, got N={params.n_bath}")


@functools.lru_cache(maxsize=8)
def _full_model(params: SpinStarParams):
    _check_oracle_size(params)
    n_sites = params.n_bath + 1
    logger.debug("building %d-dimensional spin-star Hamiltonian", 2 ** n_sites)
    sp = [_site_operator(_SIGMA_PLUS, k, n_sites) for k in range(n_sites)]
    h = np.zeros((2 ** n_sites, 2 ** n_sites), dtype=complex)
    for k in range(1, n_sites):
        h += sp[0] @ sp[k].conj().T + sp[0].conj().T @ sp[k]
    h *= params.a0
    return h, Propagator(h), dicke_states(params.n_bath)


def dicke_states(n_bath: int) -> np.ndarray:
    """Columns |N/2, N/2>, |N/2, N/2-1>, |N/2, N/2-2> by normalized repeated J_-."""
    j_minus = sum(_site_operator(_SIGMA_PLUS, k, n_bath).conj().T for k in range(n_bath))
    top = np.zeros(2 ** n_bath, dtype=complex)
    top[0] = 1.0  # all bath spins |e>
    cols = [top]
    for _ in range(2):
        nxt = j_minus @ cols[-1]
        cols.append(nxt / np.linalg.norm(nxt))
    return np.stack(cols, axis=1)


def subspace_embedding(params: SpinStarParams) -> np.ndarray:
    """Isometry (2^(N+1) x 5) mapping subspace coordinates into the product basis."""
    _check_oracle_size(params)
    chi = _full_model(params)[2]
    e = np.array([1.0, 0.0], dtype=complex)
    g = np.array([0.0, 1.0], dtype=complex)
    kets = [(e, 0), (g, 0), (e, 1), (g, 1), (e, 2)]
    return np.stack([np.kron(s, chi[:, k]) for s, k in kets], axis=1)


def full_hamiltonian(params: SpinStarParams) -> np.ndarray:
    return _full_model(params)[0].copy()


def evolve_full(params: SpinStarParams, spec: CorrelatedStateSpec, times) -> np.ndarray:
    prop = _full_model(params)[1]
    psi0 = subspace_embedding(params) @ initial_subspace_state(spec)
    return prop.evolve_many(psi0, np.atleast_1d(np.asarray(times, dtype=float)))


def brute_force_reduced_states(params: SpinStarParams, spec: CorrelatedStateSpec, times) -> np.ndarray:
    rows = evolve_full(params, spec, times)
    return reduce_pure(rows, Bipartition(2, 2 ** params.n_bath))


def brute_force_reduced(params: SpinStarParams, spec: CorrelatedStateSpec, t: float) -> DensityMatrix:
    return DensityMatrix(brute_force_reduced_states(params, spec, [t])[0])


def excitation_full(params: SpinStarParams) -> np.ndarray:
    """sigma_z/2 + J_z on the product basis (diagonal)."""
    _check_oracle_size(params)
    n_sites = params.n_bath + 1
    sz = sum(np.diag(_site_operator(_SIGMA_Z, k, n_sites)).real for k in range(n_sites))
    return 0.5 * sz

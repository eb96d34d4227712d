"""The four normalized distance measures and the witness machinery built on them.

All measures take DensityMatrix values or raw (batched) ndarrays of shape
(..., d, d) and return a float, or an array over the batch axes.
"""

from __future__ import annotations

import logging
from typing import Callable, Dict

import numpy as np

from .errors import ConsistencyError, InvalidInputError
from .linalg import MatrixLike, dagger, entries, psd_sqrt, reduce_mixed, von_neumann_entropy
from .types import Bipartition, Keep, MeasureKind

logger = logging.getLogger(__name__)

RADICAND_CLAMP = 1e-12
# Below this a radicand is a bug, not roundoff.
RADICAND_FAIL = 1e-10
# Entropy differences below this are eigenvalue roundoff.
JS_NOISE_FLOOR = 1e-14


def _pair(rho1: MatrixLike, rho2: MatrixLike):
    a, b = entries(rho1), entries(rho2)
    if a.shape[-2:] != b.shape[-2:]:
        raise InvalidInputError(f"dimension mismatch: {a.shape[-2:]} vs {b.shape[-2:]}")
    return a, b


def _sqrt_radicand(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    low = float(np.min(x)) if x.size else 0.0
    if low < -RADICAND_FAIL:
        raise ConsistencyError(f"negative radicand {low:.3e} in a distance measure")
    if low < -RADICAND_CLAMP:
        logger.debug("clamping radicand %.3e", low)
    return np.sqrt(np.clip(x, 0.0, None))


def _out(x):
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return float(x) if x.ndim == 0 else x


def trace_distance(rho1: MatrixLike, rho2: MatrixLike):
    a, b = _pair(rho1, rho2)
    w = np.linalg.eigvalsh(a - b)
    return _out(0.5 * np.sum(np.abs(w), axis=-1))


def bures(rho1: MatrixLike, rho2: MatrixLike):
    """sqrt(1 - sqrt F).

    1 - sqrt F equals min_W ||sqrt(rho1) - sqrt(rho2) W||^2 / 2 over unitaries W, attained at
    the polar unitary of sqrt(rho1) sqrt(rho2); the squared norm has no cancellation near F = 1.
    """
    a, b = _pair(rho1, rho2)
    sa, sb = psd_sqrt(a), psd_sqrt(b)
    u, _, vh = np.linalg.svd(sa @ sb)
    diff = sa - sb @ (dagger(vh) @ dagger(u))
    return _out(_sqrt_radicand(0.5 * np.sum(np.abs(diff) ** 2, axis=(-2, -1))))


def affinity(rho1: MatrixLike, rho2: MatrixLike):
    """Re Tr(sqrt(rho2) sqrt(rho1))."""
    a, b = _pair(rho1, rho2)
    return np.einsum("...ij,...ji->...", psd_sqrt(b), psd_sqrt(a)).real


def hellinger(rho1: MatrixLike, rho2: MatrixLike):
    """sqrt(1 - Tr(sqrt(rho2) sqrt(rho1))), evaluated as ||sqrt(rho1) - sqrt(rho2)||^2 / 2 under the root."""
    a, b = _pair(rho1, rho2)
    diff = psd_sqrt(a) - psd_sqrt(b)
    return _out(_sqrt_radicand(0.5 * np.sum(np.abs(diff) ** 2, axis=(-2, -1))))


def jensen_shannon(rho1: MatrixLike, rho2: MatrixLike, log_base: float = 2.0):
    """sqrt(S((rho1 + rho2)/2) - S(rho1)/2 - S(rho2)/2), bits by default so the supremum is 1.

    The entropy difference is only good to about 1e-15, so radicands below JS_NOISE_FLOOR
    read as zero: distances under 1e-7 are not resolved.
    """
    a, b = _pair(rho1, rho2)
    s_mid = np.asarray(von_neumann_entropy(0.5 * (a + b), log_base))
    s1 = np.asarray(von_neumann_entropy(a, log_base))
    s2 = np.asarray(von_neumann_entropy(b, log_base))
    radicand = s_mid - 0.5 * s1 - 0.5 * s2
    return _out(_sqrt_radicand(np.where(np.abs(radicand) < JS_NOISE_FLOOR, 0.0, radicand)))


_MEASURES: Dict[MeasureKind, Callable] = {
    MeasureKind.TRACE: trace_distance,
    MeasureKind.BURES: bures,
    MeasureKind.HELLINGER: hellinger,
}


def distance(kind: MeasureKind, rho1: MatrixLike, rho2: MatrixLike, js_log_base: float = 2.0):
    if kind is MeasureKind.JENSEN_SHANNON:
        return jensen_shannon(rho1, rho2, js_log_base)
    return _MEASURES[kind](rho1, rho2)


def delta_distance(kind: MeasureKind, rho_t_corr: MatrixLike, rho_t_ref: MatrixLike,
                   rho_0_corr: MatrixLike, rho_0_ref: MatrixLike, js_log_base: float = 2.0):
    """D_k(rho_t_corr, rho_t_ref) - D_k(rho_0_corr, rho_0_ref); signed."""
    _pair(rho_t_corr, rho_0_corr)
    now = np.asarray(distance(kind, rho_t_corr, rho_t_ref, js_log_base))
    then = np.asarray(distance(kind, rho_0_corr, rho_0_ref, js_log_base))
    d = now - then
    return float(d) if d.ndim == 0 else d


# -----------------------------
# Subadditivity and the witness bound
# -----------------------------

def q_function(r, s):
    """sqrt(1 - sqrt R) + sqrt(1 - sqrt S) - sqrt(1 - sqrt(RS)) on [0, 1]^2."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any((r < 0.0) | (r > 1.0)) or np.any((s < 0.0) | (s > 1.0)):
        raise InvalidInputError("Q(R, S) needs 0 <= R, S <= 1")
    q = np.sqrt(1.0 - np.sqrt(r)) + np.sqrt(1.0 - np.sqrt(s)) - np.sqrt(1.0 - np.sqrt(r * s))
    return float(q) if q.ndim == 0 else q


def marginals(rho_se: np.ndarray, part: Bipartition):
    """(rho_S, rho_E) of a joint state."""
    return reduce_mixed(rho_se, part, Keep.SYSTEM), reduce_mixed(rho_se, part, Keep.ENVIRONMENT)


# Only these two are proven witnesses (contractive, subadditive, triangle inequality).
WITNESS_MEASURES = (MeasureKind.TRACE, MeasureKind.BURES)


def witness_bound_rhs(rho_se_1: MatrixLike, rho_se_2: MatrixLike, part: Bipartition,
                      kind: MeasureKind = MeasureKind.TRACE) -> float:
    """sum_k D(rho_SE^k, rho_S^k x rho_E^k) + D(rho_E^1, rho_E^2)."""
    if kind not in WITNESS_MEASURES:
        raise InvalidInputError(f"{kind.name} is not a proven correlation witness")
    a, b = _pair(rho_se_1, rho_se_2)
    if a.shape != (part.dim, part.dim):
        raise InvalidInputError(f"states of shape {a.shape} do not match bipartition {part.dim}")
    total = 0.0
    env = []
    for rho in (a, b):
        rho_s, rho_e = marginals(rho, part)
        total += distance(kind, rho, np.kron(rho_s, rho_e))
        env.append(rho_e)
    total += distance(kind, env[0], env[1])
    return float(total)


def pure_projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def dephase(rho: MatrixLike, gamma: float) -> np.ndarray:
    """Phase-damping channel: off-diagonal entries scaled by gamma in [0, 1]."""
    if not 0.0 <= gamma <= 1.0:
        raise InvalidInputError(f"dephasing factor must lie in [0, 1], got {gamma}")
    arr = entries(rho)
    d = arr.shape[-1]
    mask = np.full((d, d), gamma)
    np.fill_diagonal(mask, 1.0)
    return arr * mask


def dilated_channel(rho: MatrixLike, unitary: np.ndarray, env_state: np.ndarray) -> np.ndarray:
    """Tr_E[U (rho x |e><e|) U^dagger] for a unitary dilation on system x environment."""
    arr = entries(rho)
    d_s = arr.shape[-1]
    d_e = int(np.asarray(env_state).size)
    joint = np.kron(arr, pure_projector(env_state))
    out = unitary @ joint @ dagger(unitary)
    return reduce_mixed(out, Bipartition(d_s, d_e), Keep.SYSTEM)

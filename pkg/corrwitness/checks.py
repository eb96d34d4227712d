"""Verification suites behind `corrwitness verify`.

Each check reduces to one worst-case number compared against a limit, in the
same OK/STOP spirit as a limit band: PASS when worst <= limit, FAIL otherwise.
"""

from __future__ import annotations

import logging
from typing import Callable, Dict, List, Sequence

import numpy as np

from . import dephasing, spinstar
from .distances import (
    WITNESS_MEASURES,
    dephase,
    dilated_channel,
    distance,
    q_function,
    trace_distance,
)
from .linalg import random_density_matrix
from .sampling import haar_unitary, random_amplitudes, sample_rng
from .sim import default_config, witness_bound_sweep
from .types import (
    MEASURES,
    CheckResult,
    CorrelatedStateSpec,
    DephasingParams,
    MeasureKind,
    Model,
    SpinStarParams,
    StateFamily,
)

logger = logging.getLogger(__name__)

PASS = "PASS"
FAIL = "FAIL"

SUITES = ("oracles", "properties", "bounds")

DEPHASING_ORACLE_LIMIT = 1e-8
SPINSTAR_ORACLE_LIMIT = 1e-10
CLOSURE_LIMIT = 1e-12
FRAME_LIMIT = 1e-10
METRIC_SLACK = 1e-10
CONTRACTION_SLACK = 1e-10

CONTRACTIVE = (MeasureKind.TRACE, MeasureKind.BURES, MeasureKind.HELLINGER)
TRIANGLE = (MeasureKind.TRACE, MeasureKind.BURES, MeasureKind.HELLINGER)
SPINSTAR_ORACLE_SIZES = (2, 4, 6, 8)
PROPERTY_SAMPLES = 10_000


def _result(suite: str, name: str, worst: float, limit: float, detail: str = "") -> CheckResult:
    status = PASS if worst <= limit else FAIL
    if status == FAIL:
        logger.warning("check failed: %s/%s worst=%.3e limit=%.1e %s", suite, name, worst, limit, detail)
    return CheckResult(suite, name, float(worst), float(limit), status, detail)


def _random_spec(seed: int, i: int) -> CorrelatedStateSpec:
    rng = sample_rng(seed, i)
    b1, b2 = random_amplitudes(rng)
    u = haar_unitary(rng)
    return CorrelatedStateSpec(b1, b2, float(rng.uniform()), u)


# -----------------------------
# Oracles
# -----------------------------

def check_dephasing_oracle(params: DephasingParams, n_specs: int = 100, n_times: int = 100,
                           seed: int = 0) -> CheckResult:
    times = np.linspace(0.0, params.period, n_times, endpoint=False)
    worst = 0.0
    for i in range(n_specs):
        spec = _random_spec(seed, i)
        closed = dephasing.reduced_states(params, spec, times)
        oracle = dephasing.oracle_reduced_states(params, spec, times)
        worst = max(worst, float(np.max(trace_distance(closed, oracle))))
    return _result("oracles", "dephasing closed form vs Fock oracle", worst, DEPHASING_ORACLE_LIMIT,
                   f"{n_specs} specs x {n_times} times")


def check_frames(params: DephasingParams, n_specs: int = 20, n_times: int = 50, seed: int = 0) -> CheckResult:
    times = np.linspace(0.0, params.period, n_times, endpoint=False)
    worst = 0.0
    for i in range(n_specs):
        spec = _random_spec(seed, i)
        ref = spec.uncorrelated()
        lab = [dephasing.reduced_states(params, s, times, "lab") for s in (spec, ref)]
        rot = [dephasing.reduced_states(params, s, times, "rotating") for s in (spec, ref)]
        for kind in MEASURES:
            gap = np.abs(np.asarray(distance(kind, *lab)) - np.asarray(distance(kind, *rot)))
            worst = max(worst, float(np.max(gap)))
    return _result("oracles", "lab vs rotating frame distances", worst, FRAME_LIMIT)


def check_spinstar_oracle(a0: float = spinstar.A0, sizes: Sequence[int] = SPINSTAR_ORACLE_SIZES,
                          n_specs: int = 50, n_times: int = 20, seed: int = 0) -> CheckResult:
    worst = 0.0
    for n in sizes:
        params = SpinStarParams(a0, n)
        times = np.linspace(0.0, 4.0 * np.pi / params.rabi_frequency, n_times)
        for i in range(n_specs):
            spec = _random_spec(seed, i)
            sub = spinstar.reduced_states_spinstar(params, spec, times)
            full = spinstar.brute_force_reduced_states(params, spec, times)
            worst = max(worst, float(np.max(trace_distance(sub, full))))
    return _result("oracles", "spin-star subspace vs full space", worst, SPINSTAR_ORACLE_LIMIT,
                   f"N in {tuple(sizes)}, {n_specs} specs x {n_times} times")


def check_spinstar_closure(a0: float = spinstar.A0, sizes: Sequence[int] = SPINSTAR_ORACLE_SIZES) -> CheckResult:
    """H and the excitation number both map the five kets onto their own span."""
    worst = 0.0
    for n in sizes:
        params = SpinStarParams(a0, n)
        emb = spinstar.subspace_embedding(params)
        h_sub = spinstar.hamiltonian_subspace(params).entries
        worst = max(worst, float(np.max(np.abs(emb.conj().T @ emb - np.eye(5)))))
        worst = max(worst, float(np.max(np.abs(spinstar.full_hamiltonian(params) @ emb - emb @ h_sub))))
        exc = spinstar.excitation_full(params)[:, None] * emb - emb * spinstar.excitation_subspace(params)
        worst = max(worst, float(np.max(np.abs(exc))))
    return _result("oracles", "spin-star subspace closure", worst, CLOSURE_LIMIT)


# -----------------------------
# Distance properties
# -----------------------------

def _qubit_states(rng: np.random.Generator, n: int) -> np.ndarray:
    """n Ginibre-distributed qubit density matrices, shape (n, 2, 2)."""
    g = rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))
    rho = g @ np.conj(np.swapaxes(g, -1, -2))
    return rho / np.trace(rho, axis1=-2, axis2=-1).real[:, None, None]


def _random_pairs(seed: int, n: int, dim: int):
    rng = np.random.default_rng(seed)
    return [(random_density_matrix(dim, rng), random_density_matrix(dim, rng)) for _ in range(n)], rng


def check_metric_axioms(n: int = PROPERTY_SAMPLES, seed: int = 0) -> List[CheckResult]:
    rng = np.random.default_rng(seed)
    a, b, c = (_qubit_states(rng, n) for _ in range(3))
    out = []
    for kind in MEASURES:
        d_ab = np.asarray(distance(kind, a, b))
        identity = float(np.max(distance(kind, a, a)))
        symmetry = float(np.max(np.abs(d_ab - distance(kind, b, a))))
        triangle = 0.0
        if kind in TRIANGLE:
            triangle = float(np.max(d_ab - distance(kind, a, c) - distance(kind, c, b)))
        worst = max(identity, symmetry, triangle)
        out.append(_result("properties", f"metric axioms ({kind.name})", worst, METRIC_SLACK,
                           f"identity {identity:.1e}, symmetry {symmetry:.1e}, triangle {triangle:.1e}"))
    return out


def check_unit_range(n: int = PROPERTY_SAMPLES, seed: int = 1) -> CheckResult:
    rng = np.random.default_rng(seed)
    a, b = _qubit_states(rng, n), _qubit_states(rng, n)
    worst = 0.0
    for kind in MEASURES:
        d = np.asarray(distance(kind, a, b))
        worst = max(worst, float(np.max(-d)), float(np.max(d - 1.0)))
    # Orthogonal pure states sit on the upper end.
    e0 = np.diag([1.0, 0.0]).astype(complex)
    e1 = np.diag([0.0, 1.0]).astype(complex)
    top = max(abs(distance(kind, e0, e1) - 1.0) for kind in MEASURES)
    return _result("properties", "distances in [0, 1]", max(worst, top), METRIC_SLACK, f"{n} qubit pairs")


def check_contractivity(n: int = 200, seed: int = 2) -> List[CheckResult]:
    pairs, rng = _random_pairs(seed, n, 2)
    out = []
    for kind in MEASURES:
        worst = -np.inf
        for a, b in pairs:
            before = distance(kind, a, b)
            gamma = float(rng.uniform())
            worst = max(worst, distance(kind, dephase(a, gamma), dephase(b, gamma)) - before)
            u = haar_unitary(rng, 4)
            env = random_amplitudes(rng)
            worst = max(worst, distance(kind, dilated_channel(a, u, env), dilated_channel(b, u, env)) - before)
        if kind in CONTRACTIVE:
            out.append(_result("properties", f"contractivity ({kind.name})", worst, CONTRACTION_SLACK))
        else:
            # Recorded, not asserted.
            out.append(_result("properties", f"contractivity ({kind.name})", worst, np.inf, "recorded only"))
    return out


def check_subadditivity(n: int = 200, seed: int = 3) -> List[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []
    for kind in WITNESS_MEASURES:
        worst = -np.inf
        for _ in range(n):
            r1, r2, s1, s2 = (random_density_matrix(2, rng) for _ in range(4))
            lhs = distance(kind, np.kron(r1, s1), np.kron(r2, s2))
            worst = max(worst, lhs - distance(kind, r1, r2) - distance(kind, s1, s2))
        out.append(_result("properties", f"subadditivity ({kind.name})", worst, CONTRACTION_SLACK))
    return out


def check_q_function(points: int = 100) -> CheckResult:
    grid = np.linspace(0.0, 1.0, points)
    q = q_function(grid[:, None], grid[None, :])
    return _result("properties", "Q(R, S) >= 0", float(-np.min(q)), 1e-15, f"{points}x{points} grid")


# -----------------------------
# Witness bound
# -----------------------------

def check_witness_bound(params: DephasingParams, samples: int = 50, lambda_points: int = 21,
                        time_points: int = 400, seed: int = 0, progress: bool = False) -> CheckResult:
    config = default_config(Model.DEPHASING, params, samples=samples, master_seed=seed,
                            lambda_points=lambda_points, time_points=time_points)
    report = witness_bound_sweep(params, StateFamily.HAAR_RANDOM, config, progress=progress)
    return _result("bounds", "witness bound (T, B)", float(len(report.violations)), 0.0,
                   f"{report.checked} states, max lhs - rhs = {report.max_lhs_minus_rhs:.3e}")


# -----------------------------
# Suites
# -----------------------------

def _oracles(params: DephasingParams, seed: int, quick: bool, progress: bool) -> List[CheckResult]:
    scale = 5 if quick else 1
    return [
        check_dephasing_oracle(params, n_specs=100 // scale, n_times=100 // scale, seed=seed),
        check_frames(params, seed=seed),
        check_spinstar_oracle(n_specs=50 // scale, seed=seed),
        check_spinstar_closure(),
    ]


def _properties(params: DephasingParams, seed: int, quick: bool, progress: bool) -> List[CheckResult]:
    n = 40 if quick else 200
    batch = 1000 if quick else PROPERTY_SAMPLES
    return [
        *check_metric_axioms(batch, seed=seed),
        check_unit_range(batch, seed=seed + 1),
        *check_contractivity(n, seed=seed + 2),
        *check_subadditivity(n, seed=seed + 3),
        check_q_function(),
    ]


def _bounds(params: DephasingParams, seed: int, quick: bool, progress: bool) -> List[CheckResult]:
    if quick:
        return [check_witness_bound(params, samples=5, lambda_points=6, time_points=200, seed=seed)]
    return [check_witness_bound(params, seed=seed, progress=progress)]


_SUITES: Dict[str, Callable[..., List[CheckResult]]] = {
    "oracles": _oracles,
    "properties": _properties,
    "bounds": _bounds,
}


def run_suite(name: str, params: DephasingParams | None = None, seed: int = 0, quick: bool = False,
              progress: bool = False) -> List[CheckResult]:
    """Run one suite, or every suite for name == "all"."""
    params = params or DephasingParams()
    names = SUITES if name == "all" else (name,)
    results: List[CheckResult] = []
    for suite in names:
        if suite not in _SUITES:
            raise KeyError(suite)
        logger.info("verify: running %s suite", suite)
        results.extend(_SUITES[suite](params, seed, quick, progress))
    return results


def all_passed(results: Sequence[CheckResult]) -> bool:
    return all(r.status == PASS for r in results)

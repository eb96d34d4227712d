"""Monte Carlo engine: distance traces, increase detection and frequency sweeps.

Every sample draws its amplitudes (and, for the Haar family, its local unitary)
from a generator keyed on (master_seed, lambda index, sample index), so the
curves do not depend on how the work is split across processes.
"""

from __future__ import annotations

import logging
import multiprocessing
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from . import dephasing, spinstar
from .distances import WITNESS_MEASURES, distance, pure_projector, witness_bound_rhs
from .errors import InvalidInputError
from .linalg import purity
from .sampling import haar_unitary, random_amplitudes, sample_rng
from .types import (
    MEASURES,
    Bipartition,
    BoundViolation,
    ConcurrenceMap,
    CorrelatedStateSpec,
    DephasingParams,
    ExperimentConfig,
    FockCutoff,
    FrequencyCurve,
    MeasureKind,
    Model,
    SpinStarParams,
    StateFamily,
    TimeTrace,
    WitnessReport,
)

logger = logging.getLogger(__name__)

__all__ = [
    "haar_unitary",
    "random_amplitudes",
    "time_trace",
    "has_increase",
    "increase_intervals",
    "frequency_curve",
    "concurrence_map",
    "witness_bound_sweep",
]

DEFAULT_SAMPLES = 50_000
LAMBDA_POINTS = 51
TIME_POINTS = 2000
INCREASE_TOLERANCE = 1e-9
BOUND_SLACK = 1e-8
# Samples per work item handed to a worker process.
CHUNK = 250

Params = Union[DephasingParams, SpinStarParams]


# -----------------------------
# Grids and configuration
# -----------------------------

def lambda_grid(points: int = LAMBDA_POINTS) -> np.ndarray:
    if points < 1:
        raise InvalidInputError(f"lambda grid needs at least one point, got {points}")
    return np.linspace(0.0, 1.0, points) if points > 1 else np.zeros(1)


def dephasing_time_grid(params: DephasingParams, points: int = TIME_POINTS) -> np.ndarray:
    """One period [0, 2 pi / omega), `points` samples."""
    return np.linspace(0.0, params.period, points, endpoint=False)


def default_params(model: Model) -> Params:
    if model is Model.DEPHASING:
        return DephasingParams(dephasing.EPSILON, dephasing.OMEGA, dephasing.G0, dephasing.Z)
    return SpinStarParams(spinstar.A0, spinstar.N_BATH)


def default_config(model: Model, params: Params, samples: int = DEFAULT_SAMPLES, master_seed: int = 0,
                   lambda_points: int = LAMBDA_POINTS, time_points: int = TIME_POINTS,
                   t_max: Optional[float] = None, increase_tolerance: float = INCREASE_TOLERANCE,
                   js_log_base: float = 2.0) -> ExperimentConfig:
    if t_max is not None:
        times = np.linspace(0.0, t_max, time_points, endpoint=False)
    elif model is Model.DEPHASING:
        times = dephasing_time_grid(params, time_points)
    else:
        times = spinstar.default_time_grid(params, time_points)
    return ExperimentConfig(
        samples=samples,
        master_seed=master_seed,
        lambda_grid=lambda_grid(lambda_points),
        time_grid=times,
        increase_tolerance=increase_tolerance,
        js_log_base=js_log_base,
    )


# -----------------------------
# Traces
# -----------------------------

def reduced_states_for(model: Model, params: Params, spec: CorrelatedStateSpec, times) -> np.ndarray:
    if model is Model.DEPHASING:
        return dephasing.reduced_states(params, spec, times)
    return spinstar.reduced_states_spinstar(params, spec, times)


def delta_traces(model: Model, params: Params, spec: CorrelatedStateSpec, times,
                 js_log_base: float = 2.0) -> Dict[MeasureKind, np.ndarray]:
    """Delta D_k(lambda, t) for all four measures against the lambda = 0 partner of `spec`."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if spec.lam == 0.0:
        return {k: np.zeros(times.size) for k in MEASURES}
    grid = np.concatenate(([0.0], times))
    corr = reduced_states_for(model, params, spec, grid)
    ref = reduced_states_for(model, params, spec.uncorrelated(), grid)
    out = {}
    for kind in MEASURES:
        d = np.asarray(distance(kind, corr, ref, js_log_base))
        out[kind] = d[1:] - d[0]
    return out


def time_trace(model: Model, params: Params, spec: CorrelatedStateSpec, measure: MeasureKind,
               config: ExperimentConfig) -> TimeTrace:
    values = delta_traces(model, params, spec, config.time_grid, config.js_log_base)[measure]
    return TimeTrace(measure=measure, lam=spec.lam, times=config.time_grid.copy(), delta_values=values)


def has_increase(trace: TimeTrace, tol: float = INCREASE_TOLERANCE) -> bool:
    return bool(np.any(trace.delta_values > tol))


def increase_intervals(trace: TimeTrace, tol: float = INCREASE_TOLERANCE) -> List[Tuple[float, float]]:
    """Maximal runs of grid times with Delta D > tol, as (first, last) time pairs."""
    above = np.asarray(trace.delta_values) > tol
    out = []
    start = None
    for i, flag in enumerate(above):
        if flag and start is None:
            start = i
        if not flag and start is not None:
            out.append((float(trace.times[start]), float(trace.times[i - 1])))
            start = None
    if start is not None:
        out.append((float(trace.times[start]), float(trace.times[-1])))
    return out


# -----------------------------
# Sampling
# -----------------------------

def draw_spec(family: StateFamily, master_seed: int, lam_idx: int, sample_idx: int, lam: float) -> CorrelatedStateSpec:
    rng = sample_rng(master_seed, lam_idx, sample_idx)
    b1, b2 = random_amplitudes(rng)
    return dephasing.family_spec(family, b1, b2, lam, rng)


@dataclass(frozen=True)
class _Job:
    model: Model
    params: Params
    family: StateFamily
    config: ExperimentConfig
    lam_idx: int
    start: int
    stop: int


def _count_increases(job: _Job) -> Tuple[int, np.ndarray]:
    cfg = job.config
    lam = float(cfg.lambda_grid[job.lam_idx])
    counts = np.zeros(len(MEASURES), dtype=np.int64)
    if lam == 0.0:
        return job.lam_idx, counts
    for s in range(job.start, job.stop):
        spec = draw_spec(job.family, cfg.master_seed, job.lam_idx, s, lam)
        traces = delta_traces(job.model, job.params, spec, cfg.time_grid, cfg.js_log_base)
        for m, kind in enumerate(MEASURES):
            if np.any(traces[kind] > cfg.increase_tolerance):
                counts[m] += 1
    return job.lam_idx, counts


def _jobs(model, params, family, config) -> List[_Job]:
    jobs = []
    for li in range(config.lambda_grid.size):
        for start in range(0, config.samples, CHUNK):
            jobs.append(_Job(model, params, family, config, li, start, min(start + CHUNK, config.samples)))
    return jobs


def frequency_curve(model: Model, params: Params, family: StateFamily, config: ExperimentConfig,
                    threads: int = 1, progress: bool = False) -> FrequencyCurve:
    """f^k(lambda): fraction of sampled states whose Delta D_k exceeds the tolerance somewhere on the grid."""
    jobs = _jobs(model, params, family, config)
    counts = np.zeros((config.lambda_grid.size, len(MEASURES)), dtype=np.int64)
    logger.info(
        "frequency sweep: model=%s family=%s samples=%d lambdas=%d times=%d workers=%d",
        model.value, family.value, config.samples, config.lambda_grid.size, config.time_grid.size, threads,
    )
    started = time.perf_counter()
    bar = tqdm(total=len(jobs), desc=f"{model.value}/{family.value}", unit="chunk", disable=not progress)
    if threads <= 1:
        for job in jobs:
            li, c = _count_increases(job)
            counts[li] += c
            bar.update()
    else:
        with multiprocessing.Pool(processes=threads) as pool:
            for li, c in pool.imap_unordered(_count_increases, jobs):
                counts[li] += c
                bar.update()
    bar.close()
    logger.info("frequency sweep done in %.1f s", time.perf_counter() - started)
    return FrequencyCurve(
        family=family.value if model is Model.DEPHASING else f"spinstar-{family.value}",
        lambdas=config.lambda_grid.copy(),
        counts={kind: counts[:, m] for m, kind in enumerate(MEASURES)},
        samples=config.samples,
        master_seed=config.master_seed,
    )


# -----------------------------
# Concurrence map
# -----------------------------

def concurrence_map(params: DephasingParams, b1: complex, b2: complex, config: ExperimentConfig,
                    family: StateFamily = StateFamily.ORIGINAL,
                    unitary: Optional[np.ndarray] = None) -> ConcurrenceMap:
    """C(lambda, t) = sqrt(2 (1 - P(rho_S))) of the evolving total pure state.

    threshold_lambda is the largest grid lambda whose concurrence rises above C(lambda, 0)
    somewhere in [0, pi]; None when no lambda does.
    """
    if family is StateFamily.HAAR_RANDOM and unitary is None:
        raise InvalidInputError("a Haar-random concurrence map needs an explicit unitary")
    times = config.time_grid
    window = np.concatenate(([0.0], times[times <= np.pi]))
    values = np.empty((config.lambda_grid.size, times.size))
    threshold = None
    for li, lam in enumerate(config.lambda_grid):
        if unitary is not None:
            spec = CorrelatedStateSpec(b1, b2, float(lam), unitary)
        else:
            spec = dephasing.family_spec(family, b1, b2, float(lam))
        values[li] = _concurrence(dephasing.reduced_states(params, spec, times))
        c_window = _concurrence(dephasing.reduced_states(params, spec, window))
        if np.max(c_window[1:], initial=c_window[0]) - c_window[0] > config.increase_tolerance:
            threshold = float(lam)
    return ConcurrenceMap(lambdas=config.lambda_grid.copy(), times=times.copy(), values=values,
                          threshold_lambda=threshold)


def _concurrence(rho: np.ndarray) -> np.ndarray:
    return np.sqrt(np.clip(2.0 * (1.0 - np.asarray(purity(rho))), 0.0, 1.0))


# -----------------------------
# Witness bound
# -----------------------------

def witness_bound_sweep(params: DephasingParams, family: StateFamily, config: ExperimentConfig,
                        cutoff: FockCutoff = dephasing.DEFAULT_CUTOFF,
                        kinds: Sequence[MeasureKind] = WITNESS_MEASURES,
                        progress: bool = False) -> WitnessReport:
    """Check max_t Delta D_k <= sum of correlation terms + environment term at t = 0."""
    part = Bipartition(2, cutoff.dim)
    report = WitnessReport()
    total = config.lambda_grid.size * config.samples
    bar = tqdm(total=total, desc="witness bound", unit="state", disable=not progress)
    for li, lam in enumerate(config.lambda_grid):
        for s in range(config.samples):
            spec = draw_spec(family, config.master_seed, li, s, float(lam))
            traces = delta_traces(Model.DEPHASING, params, spec, config.time_grid, config.js_log_base)
            rho_1 = pure_projector(dephasing.total_state_fock(params, spec, cutoff).amplitudes)
            rho_2 = pure_projector(dephasing.total_state_fock(params, spec.uncorrelated(), cutoff).amplitudes)
            for kind in kinds:
                lhs = float(np.max(traces[kind]))
                rhs = witness_bound_rhs(rho_1, rho_2, part, kind)
                report.max_lhs_minus_rhs = max(report.max_lhs_minus_rhs, lhs - rhs)
                if lhs > rhs + BOUND_SLACK:
                    logger.warning("witness bound violated: lambda=%.3f sample=%d %s lhs=%.3e rhs=%.3e",
                                   lam, s, kind.name, lhs, rhs)
                    report.violations.append(BoundViolation(s, float(lam), kind, lhs, rhs))
            report.checked += 1
            bar.update()
    bar.close()
    return report


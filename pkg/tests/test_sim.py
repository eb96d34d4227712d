import numpy as np
import pytest
import scipy.stats

from corrwitness import sim
from corrwitness.errors import InvalidInputError
from corrwitness.sampling import haar_unitary, random_amplitudes, sample_rng
from corrwitness.types import (
    MEASURES,
    CorrelatedStateSpec,
    DephasingParams,
    MeasureKind,
    Model,
    SpinStarParams,
    StateFamily,
    TimeTrace,
)

rng = np.random.default_rng(237)


def _trace(values):
    values = np.asarray(values, dtype=float)
    return TimeTrace(MeasureKind.TRACE, 0.5, np.arange(values.size, dtype=float), values)


def test_grids(params):
    lam = sim.lambda_grid()
    assert lam.size == 51 and lam[0] == 0 and lam[-1] == 1
    assert abs(lam[1] - 0.02) < 1e-15
    times = sim.dephasing_time_grid(params, 2000)
    assert times.size == 2000 and times[0] == 0 and times[-1] < 2 * np.pi
    config = sim.default_config(Model.SPINSTAR, SpinStarParams(), samples=10)
    assert config.time_grid[-1] < 10 * np.pi / np.sqrt(20)


def test_haar_unitary():
    for _ in range(1000):
        u = haar_unitary(rng)
        assert np.abs(u.conj().T @ u - np.eye(2)).max() < 1e-12
    x = np.array([abs(haar_unitary(rng)[0, 0]) ** 2 for _ in range(20000)])
    assert abs(x.mean() - 0.5) < 0.01
    assert scipy.stats.kstest(x, "uniform").pvalue > 0.01


def test_random_amplitudes():
    b = np.array([random_amplitudes(rng) for _ in range(20000)])
    assert np.abs(np.abs(b[:, 0]) ** 2 + np.abs(b[:, 1]) ** 2 - 1).max() < 1e-12
    p1 = np.abs(b[:, 0]) ** 2
    assert abs(p1.mean() - 0.5) < 0.01
    u = haar_unitary(np.random.default_rng(1))
    p1_rotated = np.abs(b @ u.T)[:, 0] ** 2
    assert scipy.stats.ks_2samp(p1[:10000], p1_rotated[10000:]).pvalue > 0.01


def test_sample_rng_is_keyed():
    a = sample_rng(7, 3, 11).normal(size=4)
    b = sample_rng(7, 3, 11).normal(size=4)
    c = sample_rng(7, 11, 3).normal(size=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    spec_a = sim.draw_spec(StateFamily.HAAR_RANDOM, 7, 3, 11, 0.4)
    spec_b = sim.draw_spec(StateFamily.HAAR_RANDOM, 7, 3, 11, 0.4)
    assert spec_a.b1 == spec_b.b1 and np.array_equal(spec_a.unitary, spec_b.unitary)


@pytest.mark.parametrize("model", list(Model))
def test_delta_traces_zero_at_start_and_for_lambda_zero(model):
    params = DephasingParams() if model is Model.DEPHASING else SpinStarParams(n_bath=6)
    config = sim.default_config(model, params, samples=1, time_points=100)
    spec = CorrelatedStateSpec(0.6, 0.8, 0.3, haar_unitary(rng))
    traces = sim.delta_traces(model, params, spec, config.time_grid)
    for kind in MEASURES:
        assert abs(traces[kind][0]) < 1e-12
    zero = sim.delta_traces(model, params, spec.uncorrelated(), config.time_grid)
    for kind in MEASURES:
        assert not np.any(zero[kind])


def test_time_trace_equal_weights(params, equal_weights):
    config = sim.default_config(Model.DEPHASING, params, samples=1)
    small = CorrelatedStateSpec(*equal_weights, 0.1)
    trace = sim.time_trace(Model.DEPHASING, params, small, MeasureKind.TRACE, config)
    assert trace.times.size == trace.delta_values.size == 2000
    assert trace.delta_values[0] == 0
    assert trace.delta_values.max() > 0
    assert sim.has_increase(trace)
    large = small.with_lambda(0.8)
    trace = sim.time_trace(Model.DEPHASING, params, large, MeasureKind.BURES, config)
    assert trace.delta_values.max() <= 1e-9


def test_bures_and_hellinger_never_increase_for_original_family(params, equal_weights):
    config = sim.default_config(Model.DEPHASING, params, samples=1, time_points=500)
    for lam in np.linspace(0.1, 0.9, 9):
        spec = CorrelatedStateSpec(*equal_weights, float(lam))
        traces = sim.delta_traces(Model.DEPHASING, params, spec, config.time_grid)
        assert traces[MeasureKind.BURES].max() <= 1e-9
        assert traces[MeasureKind.HELLINGER].max() <= 1e-9


def test_trace_threshold_for_equal_weights(params, equal_weights):
    config = sim.default_config(Model.DEPHASING, params, samples=1)
    increasing = {kind: [] for kind in MEASURES}
    for lam in np.round(np.arange(0.01, 1.0, 0.01), 2):
        spec = CorrelatedStateSpec(*equal_weights, float(lam))
        traces = sim.delta_traces(Model.DEPHASING, params, spec, config.time_grid)
        for kind in MEASURES:
            if traces[kind].max() > 1e-9:
                increasing[kind].append(lam)
    assert 0.35 <= max(increasing[MeasureKind.TRACE]) <= 0.45
    assert 0.15 <= max(increasing[MeasureKind.JENSEN_SHANNON]) <= 0.25


def test_has_increase():
    assert not sim.has_increase(_trace(np.zeros(5)))
    assert sim.has_increase(_trace([0, 0, 1e-6, 0]), tol=1e-9)
    assert not sim.has_increase(_trace([0, 1e-12, -1e-3]), tol=1e-9)


def test_increase_intervals():
    trace = _trace([0, 1, 1, 0, -1, 2, 0, 3])
    assert sim.increase_intervals(trace, tol=0.5) == [(1.0, 2.0), (5.0, 5.0), (7.0, 7.0)]
    assert sim.increase_intervals(_trace(np.zeros(4))) == []
    assert bool(sim.increase_intervals(trace, 0.5)) == sim.has_increase(trace, 0.5)


def test_frequency_curve_small(params):
    config = sim.default_config(Model.DEPHASING, params, samples=12, lambda_points=3, time_points=200)
    curve = sim.frequency_curve(Model.DEPHASING, params, StateFamily.ORIGINAL, config)
    freqs = curve.frequencies
    assert curve.family == "original"
    for kind in MEASURES:
        assert freqs[kind][0] == 0
        assert np.all((freqs[kind] >= 0) & (freqs[kind] <= 1))
    assert not np.any(curve.counts[MeasureKind.BURES])
    assert not np.any(curve.counts[MeasureKind.HELLINGER])
    errors = curve.standard_errors()
    assert np.all(errors[MeasureKind.TRACE] <= 0.5 / np.sqrt(12) + 1e-15)


def test_frequency_curve_independent_of_workers():
    params = SpinStarParams(n_bath=6)
    config = sim.default_config(Model.SPINSTAR, params, samples=300, master_seed=5, lambda_points=3, time_points=100)
    serial = sim.frequency_curve(Model.SPINSTAR, params, StateFamily.HAAR_RANDOM, config, threads=1)
    parallel = sim.frequency_curve(Model.SPINSTAR, params, StateFamily.HAAR_RANDOM, config, threads=2)
    for kind in MEASURES:
        assert np.array_equal(serial.counts[kind], parallel.counts[kind])


def test_concurrence_map(params, equal_weights):
    config = sim.default_config(Model.DEPHASING, params, samples=1, lambda_points=51, time_points=400)
    cmap = sim.concurrence_map(params, *equal_weights, config)
    assert cmap.values.shape == (51, 400)
    assert abs(cmap.values[0, 0]) < 1e-7
    assert np.all((cmap.values >= 0) & (cmap.values <= 1))
    assert np.all(np.diff(cmap.values[:, 0]) >= -1e-12)
    assert cmap.threshold_lambda is not None
    assert 0.32 <= cmap.threshold_lambda <= 0.36


def test_concurrence_never_rises_for_sigma_x_family(params, equal_weights):
    config = sim.default_config(Model.DEPHASING, params, samples=1, lambda_points=11, time_points=200)
    cmap = sim.concurrence_map(params, *equal_weights, config, family=StateFamily.SIGMA_X)
    assert cmap.threshold_lambda is None
    with pytest.raises(InvalidInputError):
        sim.concurrence_map(params, *equal_weights, config, family=StateFamily.HAAR_RANDOM)


def test_witness_bound_sweep(params):
    config = sim.default_config(Model.DEPHASING, params, samples=3, lambda_points=3, time_points=100)
    report = sim.witness_bound_sweep(params, StateFamily.HAAR_RANDOM, config)
    assert report.checked == 9
    assert report.ok
    assert report.max_lhs_minus_rhs <= 1e-8


@pytest.mark.slow
@pytest.mark.parametrize("family", [StateFamily.SWAPPED, StateFamily.HAAR_RANDOM])
def test_trace_distance_increases_almost_surely(params, family):
    config = sim.default_config(Model.DEPHASING, params, samples=2000, lambda_points=11)
    curve = sim.frequency_curve(Model.DEPHASING, params, family, config, threads=4)
    f = curve.frequencies[MeasureKind.TRACE]
    assert np.all(f[curve.lambdas >= 0.1] >= 0.95)


@pytest.mark.slow
def test_original_family_frequency_transition(params):
    config = sim.default_config(Model.DEPHASING, params, samples=2000, lambda_points=26)
    curve = sim.frequency_curve(Model.DEPHASING, params, StateFamily.ORIGINAL, config, threads=4)
    f = curve.frequencies
    lam = curve.lambdas
    assert not np.any(curve.counts[MeasureKind.BURES])
    assert not np.any(curve.counts[MeasureKind.HELLINGER])
    assert f[MeasureKind.TRACE][np.isclose(lam, 0.2)][0] >= 0.9
    assert f[MeasureKind.TRACE][np.isclose(lam, 0.6)][0] <= 0.1
    se = curve.standard_errors()[MeasureKind.TRACE]
    below = np.flatnonzero(f[MeasureKind.TRACE] < 0.5)
    below = below[lam[below] > 0]
    i = below[0]
    # Linear interpolation of the f^T = 1/2 crossing.
    f0, f1 = f[MeasureKind.TRACE][i - 1], f[MeasureKind.TRACE][i]
    midpoint = lam[i - 1] + (f0 - 0.5) / (f0 - f1) * (lam[i] - lam[i - 1])
    assert 0.35 <= midpoint <= 0.45
    assert np.all(se <= 0.012)


def _gap(curve, hi, lo):
    """f^hi - f^lo in units of their combined binomial standard error."""
    f = curve.frequencies
    se = curve.standard_errors()
    scale = np.sqrt(se[hi] ** 2 + se[lo] ** 2)
    return f[hi] - f[lo], 2.0 * scale


@pytest.mark.slow
def test_swapped_family_frequencies(params):
    config = sim.default_config(Model.DEPHASING, params, samples=2000, lambda_points=11)
    curve = sim.frequency_curve(Model.DEPHASING, params, StateFamily.SWAPPED, config, threads=4)
    assert not np.any(curve.counts[MeasureKind.BURES])
    assert not np.any(curve.counts[MeasureKind.HELLINGER])
    f_js = curve.frequencies[MeasureKind.JENSEN_SHANNON]
    se_js = curve.standard_errors()[MeasureKind.JENSEN_SHANNON]
    step = np.diff(f_js)
    assert np.all(step >= -2.0 * np.sqrt(se_js[1:] ** 2 + se_js[:-1] ** 2))
    assert f_js[-1] > f_js[1]


@pytest.mark.slow
@pytest.mark.parametrize("family", [StateFamily.SIGMA_X, StateFamily.HAAR_RANDOM])
def test_trace_and_jensen_shannon_dominate(params, family):
    config = sim.default_config(Model.DEPHASING, params, samples=2000, lambda_points=11)
    curve = sim.frequency_curve(Model.DEPHASING, params, family, config, threads=4)
    mask = curve.lambdas >= 0.1
    for kind in MEASURES:
        assert np.all(curve.frequencies[kind][mask] > 0)
    if family is StateFamily.HAAR_RANDOM:
        assert np.all(curve.frequencies[MeasureKind.TRACE][mask] >= 0.95)
    for hi in (MeasureKind.TRACE, MeasureKind.JENSEN_SHANNON):
        for lo in (MeasureKind.BURES, MeasureKind.HELLINGER):
            diff, two_se = _gap(curve, hi, lo)
            assert np.all(diff[mask] > two_se[mask])


@pytest.mark.slow
def test_spin_star_frequencies():
    params = SpinStarParams(1.0, 20)
    config = sim.default_config(Model.SPINSTAR, params, samples=2000, lambda_points=11)
    curve = sim.frequency_curve(Model.SPINSTAR, params, StateFamily.HAAR_RANDOM, config, threads=4)
    mask = curve.lambdas >= 0.1
    assert np.all(curve.frequencies[MeasureKind.TRACE][mask] >= 0.9)
    for kind in (MeasureKind.BURES, MeasureKind.HELLINGER):
        f = curve.frequencies[kind][mask]
        se = curve.standard_errors()[kind][mask]
        assert np.all(np.diff(f) <= 2.0 * np.sqrt(se[1:] ** 2 + se[:-1] ** 2))


@pytest.mark.slow
def test_increase_detection_is_grid_stable(params):
    coarse = sim.default_config(Model.DEPHASING, params, samples=2000, lambda_points=11, time_points=2000)
    fine = sim.default_config(Model.DEPHASING, params, samples=2000, lambda_points=11, time_points=4000)
    curves = [sim.frequency_curve(Model.DEPHASING, params, StateFamily.ORIGINAL, c, threads=4) for c in (coarse, fine)]
    for kind in MEASURES:
        f = [c.frequencies[kind] for c in curves]
        se = np.maximum(*(c.standard_errors()[kind] for c in curves))
        assert np.all(np.abs(f[1] - f[0]) <= 2.0 * se)

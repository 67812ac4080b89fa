import math

import mpmath
import numpy as np
import pytest

from ept_lab import (
    AssemblyParams,
    DegenerateSampleError,
    InsufficientDataError,
    degree_histogram,
    degrees,
    fit_exponential,
    fit_power_law,
    generate,
)
from ept_lab.netstats import MIN_TAIL, _alpha_mle
from oracles import powerlaw_sample


def test_recovers_known_alpha():
    rng = np.random.default_rng(12)
    sample = powerlaw_sample(2.2, 1, 10_000, rng)
    fit = fit_power_law(sample)
    assert 2.1 <= fit.alpha <= 2.3
    assert fit.d_min >= 1
    assert not fit.low_confidence


def test_degenerate_sample():
    with pytest.raises(DegenerateSampleError):
        fit_power_law([3] * 50)


def test_insufficient_data():
    with pytest.raises(InsufficientDataError):
        fit_power_law([1, 2, 3])
    with pytest.raises(InsufficientDataError):
        fit_power_law([0] * 100)  # zeros are excluded


def test_dmin_search_constrained_small_sample():
    # heavy singleton cannot become its own tail: n_tail >= MIN_TAIL
    sample = [1] * 30 + [100]
    fit = fit_power_law(sample)
    assert fit.n_tail >= MIN_TAIL
    # exhaustive scan with an independent zeta implementation
    data = np.asarray(sample)

    def oracle_ks(d_min, alpha):
        tail = np.sort(data[data >= d_min])
        norm = float(mpmath.zeta(alpha, d_min))
        worst = 0.0
        for d in range(d_min, int(tail.max()) + 1):
            fitted = 1.0 - float(mpmath.zeta(alpha, d + 1)) / norm
            empirical = float((tail <= d).sum()) / tail.size
            worst = max(worst, abs(empirical - fitted))
        return worst

    candidates = []
    for d_min in sorted(set(sample)):
        tail = data[data >= d_min]
        if tail.size < MIN_TAIL or np.unique(tail).size == 1:
            continue
        alpha = _alpha_mle(tail.astype(float), d_min)
        candidates.append((oracle_ks(d_min, alpha), d_min, alpha))
    best = min(candidates)
    assert fit.d_min == best[1]
    assert fit.alpha == pytest.approx(best[2])
    assert fit.ks_distance == pytest.approx(best[0], abs=1e-9)


def test_ks_matches_independent_zeta():
    rng = np.random.default_rng(5)
    sample = powerlaw_sample(2.5, 2, 2000, rng)
    fit = fit_power_law(sample)
    tail = np.sort(sample[sample >= fit.d_min])
    norm = float(mpmath.zeta(fit.alpha, fit.d_min))
    worst = 0.0
    for d in range(fit.d_min, int(tail.max()) + 1):
        fitted = 1.0 - float(mpmath.zeta(fit.alpha, d + 1)) / norm
        empirical = float((tail <= d).sum()) / tail.size
        worst = max(worst, abs(empirical - fitted))
    assert fit.ks_distance == pytest.approx(worst, abs=1e-9)


def test_stderr_scales_inverse_sqrt():
    rng = np.random.default_rng(7)
    sample = powerlaw_sample(2.0, 1, 40_000, rng)
    full = fit_power_law(sample)
    quarter = fit_power_law(sample[:10_000])
    # nested subsamples: stderr ratio tracks sqrt(n_tail ratio)
    expected = math.sqrt(full.n_tail / quarter.n_tail)
    assert quarter.alpha_stderr / full.alpha_stderr == pytest.approx(
        expected * full.alpha / quarter.alpha, rel=0.25
    )
    assert (full.alpha - 1.0) / math.sqrt(full.n_tail) == pytest.approx(
        full.alpha_stderr
    )


def test_alpha_formula_scale_covariant_at_large_dmin():
    # the half-shift estimator is scale-covariant up to the shrinking shift
    rng = np.random.default_rng(3)
    tail = powerlaw_sample(2.3, 50, 5000, rng).astype(float)
    a1 = _alpha_mle(tail, 50)
    a2 = _alpha_mle(tail * 10, 500)
    assert a2 == pytest.approx(a1, rel=0.01)


def test_recovery_within_three_stderr_most_seeds():
    hits = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        sample = powerlaw_sample(2.2, 1, 5000, rng)
        fit = fit_power_law(sample)
        if abs(fit.alpha - 2.2) <= 3 * fit.alpha_stderr:
            hits += 1
    assert hits >= 18


def test_low_confidence_flag():
    rng = np.random.default_rng(11)
    sample = powerlaw_sample(2.5, 1, 30, rng)
    fit = fit_power_law(sample)
    assert fit.low_confidence


def test_fit_exponential_mean_rate():
    fit = fit_exponential([2, 6, 2, 6])
    assert fit.mean == pytest.approx(4.0)
    assert fit.rate == pytest.approx(0.25)


def test_fit_exponential_recovers_geometric_mean():
    rng = np.random.default_rng(2)
    sample = rng.geometric(1.0 / 3.0, size=10_000)
    fit = fit_exponential(sample)
    assert 2.9 <= fit.mean <= 3.1


def test_fit_exponential_degenerate_and_insufficient():
    with pytest.raises(DegenerateSampleError):
        fit_exponential([0, 0, 0])
    with pytest.raises(InsufficientDataError):
        fit_exponential([4])


def test_histogram_rows():
    rows = degree_histogram([1, 1, 2])
    assert rows == [(1, 2, 1.0), (2, 1, pytest.approx(1 / 3))]


def test_histogram_empty():
    assert degree_histogram([]) == []


def test_histogram_ccdf_slope_matches_fit():
    dag = generate(AssemblyParams(n_nodes=10_000, seed=0))
    values = degrees(dag).out_values()
    fit = fit_power_law(values)
    rows = [r for r in degree_histogram(values) if r[0] >= fit.d_min]
    x = np.log([r[0] for r in rows])
    y = np.log([r[2] for r in rows])
    slope = np.polyfit(x, y, 1)[0]
    assert slope == pytest.approx(-(fit.alpha - 1.0), abs=0.35)

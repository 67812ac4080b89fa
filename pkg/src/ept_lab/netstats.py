"""Degree-distribution characterization: discrete power-law and exponential fits.

The power-law fit follows the standard discrete maximum-likelihood recipe:
the exponent uses the half-shift approximation
``alpha = 1 + n / sum(ln(d / (d_min - 1/2)))`` and the tail cutoff ``d_min``
is chosen to minimize the Kolmogorov-Smirnov distance between the empirical
tail and the fitted discrete law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import zeta as _hurwitz_zeta

from .graph import DegreeTable

MIN_TAIL = 10  # smallest tail the d_min search may select
LOW_CONFIDENCE_TAIL = 50  # fits on fewer tail samples are flagged


class InsufficientDataError(ValueError):
    """Too few usable values to fit."""


class DegenerateSampleError(ValueError):
    """All values identical (or all zero); the fit is undefined."""


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    alpha_stderr: float
    d_min: int
    n_tail: int
    ks_distance: float

    @property
    def low_confidence(self) -> bool:
        return self.n_tail < LOW_CONFIDENCE_TAIL

    def summary(self) -> str:
        flag = " low-confidence" if self.low_confidence else ""
        return (
            f"power-law alpha={self.alpha:.4f} stderr={self.alpha_stderr:.4f} "
            f"d_min={self.d_min} n_tail={self.n_tail} ks={self.ks_distance:.5f}{flag}"
        )


@dataclass(frozen=True)
class ExponentialFit:
    rate: float
    mean: float

    def summary(self) -> str:
        return f"exponential mean={self.mean:.4f} rate={self.rate:.6f}"


def _alpha_mle(tail: np.ndarray, d_min: int) -> float:
    shifted = np.log(tail / (d_min - 0.5))
    total = float(shifted.sum())
    if total <= 0.0:
        return math.inf
    return 1.0 + tail.size / total


def _discrete_powerlaw_ks(tail: np.ndarray, d_min: int, alpha: float) -> float:
    """Max CDF deviation over the integer support [d_min, max(tail)]."""
    top = int(tail.max())
    support = np.arange(d_min, top + 1, dtype=np.float64)
    norm = _hurwitz_zeta(alpha, d_min)
    fitted_cdf = 1.0 - _hurwitz_zeta(alpha, support + 1.0) / norm
    counts = np.bincount(tail.astype(np.int64), minlength=top + 1)[d_min:]
    empirical_cdf = np.cumsum(counts) / tail.size
    return float(np.abs(empirical_cdf - fitted_cdf).max())


def fit_power_law(values: Sequence[int]) -> PowerLawFit:
    """Fit a discrete power law to the tail of a degree sample.

    Zeros are excluded; the search over ``d_min`` candidates is restricted to
    tails of at least ``MIN_TAIL`` samples containing at least two distinct
    values, and returns the candidate of minimum KS distance.
    """
    data = np.asarray([int(v) for v in values if v >= 1], dtype=np.int64)
    if data.size < MIN_TAIL:
        raise InsufficientDataError(
            f"need at least {MIN_TAIL} nonzero values, got {data.size}"
        )
    if np.unique(data).size == 1:
        raise DegenerateSampleError("all degree values are identical")

    best: PowerLawFit | None = None
    for d_min in np.unique(data):
        d_min = int(d_min)
        tail = data[data >= d_min]
        if tail.size < MIN_TAIL or np.unique(tail).size == 1:
            continue
        alpha = _alpha_mle(tail.astype(np.float64), d_min)
        if not math.isfinite(alpha):
            continue
        ks = _discrete_powerlaw_ks(tail, d_min, alpha)
        if best is None or ks < best.ks_distance:
            best = PowerLawFit(
                alpha=alpha,
                alpha_stderr=(alpha - 1.0) / math.sqrt(tail.size),
                d_min=d_min,
                n_tail=int(tail.size),
                ks_distance=ks,
            )
    if best is None:
        raise InsufficientDataError(
            f"no tail cutoff leaves >= {MIN_TAIL} samples with spread"
        )
    return best


def fit_exponential(values: Sequence[int]) -> ExponentialFit:
    """Maximum-likelihood exponential/geometric fit: rate = 1 / sample mean."""
    data = np.asarray(list(values), dtype=np.float64)
    if data.size < 2:
        raise InsufficientDataError("need at least 2 values")
    mean = float(data.mean())
    if mean <= 0.0:
        raise DegenerateSampleError("all values are zero")
    return ExponentialFit(rate=1.0 / mean, mean=mean)


def geometric_ks(values: Sequence[int]) -> tuple[float, float]:
    """KS distance of positive integer data against its fitted geometric law.

    The law is geometric on {1, 2, ...} with success probability 1/mean.
    Returns (distance, asymptotic 5% critical value 1.358/sqrt(n)).
    """
    data = np.asarray([int(v) for v in values if v >= 1], dtype=np.int64)
    if data.size < 2:
        raise InsufficientDataError("need at least 2 positive values")
    mean = float(data.mean())
    p = 1.0 / mean
    top = int(data.max())
    support = np.arange(1, top + 1, dtype=np.float64)
    fitted_cdf = 1.0 - np.power(1.0 - p, support)
    counts = np.bincount(data, minlength=top + 1)[1:]
    empirical_cdf = np.cumsum(counts) / data.size
    ks = float(np.abs(empirical_cdf - fitted_cdf).max())
    return ks, 1.358 / math.sqrt(data.size)


def degree_histogram(table_or_values: DegreeTable | Sequence[int], which: str = "out") -> list[tuple[int, int, float]]:
    """Rows of (degree, count, ccdf) sorted by degree; ccdf is P(D >= d)."""
    if isinstance(table_or_values, DegreeTable):
        values = (
            table_or_values.out_values() if which == "out" else table_or_values.in_values()
        )
    else:
        values = list(table_or_values)
    if not values:
        return []
    data = np.asarray(values, dtype=np.int64)
    degs, counts = np.unique(data, return_counts=True)
    remaining = counts[::-1].cumsum()[::-1]
    total = data.size
    return [
        (int(d), int(c), float(r) / total)
        for d, c, r in zip(degs, counts, remaining)
    ]
